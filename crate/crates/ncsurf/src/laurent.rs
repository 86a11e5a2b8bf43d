//! Admissible sequences and the Laurent expansions they index.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::polygon::{crosses, crossing_order, Chord, Triangulation};
use crate::presentation::{sector_word, PresentationError, Rewriter};
use crate::wordcore::{AlgebraElement, Letter, Symbol, Word};

/// Vertex sequence `(i_1, ..., i_2m)` from `i` to `j` along edges of a triangulation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AdmissibleSequence(pub Vec<u32>);

impl AdmissibleSequence {
    pub fn vertices(&self) -> &[u32] {
        &self.0
    }
}

/// Depth-first enumerator for one target segment.
///
/// Search state is (vertex, parity of the next step, position of the last
/// crossing). Dead states are memoized so the search only walks prefixes
/// that extend to a complete sequence.
pub struct AdmissibleSearch {
    n: u32,
    i: u32,
    j: u32,
    neighbors: Vec<Vec<u32>>,
    positions: HashMap<Chord, usize>,
    crossing_count: usize,
}

impl AdmissibleSearch {
    pub fn new(tri: &Triangulation, i: u32, j: u32) -> AdmissibleSearch {
        assert_ne!(i, j);
        let n = tri.n();
        let seg = Chord::new(i, j);
        let crossing: Vec<Chord> = tri.diagonals().iter().copied().filter(|&d| crosses(d, seg, n)).collect();
        let order = crossing_order(i, j, &crossing, n).expect("all listed chords cross");
        let positions = order.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let neighbors = (0..=n).map(|v| if v == 0 { vec![] } else { tri.neighbors(v) }).collect();
        AdmissibleSearch { n, i, j, neighbors, positions, crossing_count: order.len() }
    }

    pub fn crossing_count(&self) -> usize {
        self.crossing_count
    }

    fn state_index(&self, v: u32, even: bool, last: Option<usize>) -> usize {
        let l = last.map_or(0, |x| x + 1);
        ((v as usize * 2 + even as usize) * (self.crossing_count + 1)) + l
    }

    /// Calls `f` on every admissible sequence in depth-first order.
    pub fn for_each<F: FnMut(&[u32])>(&self, mut f: F) {
        let mut viable: Vec<Option<bool>> = vec![None; (self.n as usize + 1) * 2 * (self.crossing_count + 1)];
        let mut seq = vec![self.i];
        self.walk(&mut seq, None, &mut viable, &mut f);
    }

    // Returns whether at least one sequence was emitted below this prefix.
    fn walk<F: FnMut(&[u32])>(
        &self,
        seq: &mut Vec<u32>,
        last: Option<usize>,
        viable: &mut Vec<Option<bool>>,
        f: &mut F,
    ) -> bool {
        let v = *seq.last().unwrap();
        // the step about to be taken is step number seq.len() (1-based)
        let even = seq.len() % 2 == 0;
        let key = self.state_index(v, even, last);
        if viable[key] == Some(false) {
            return false;
        }
        let mut found = false;
        for idx in 0..self.neighbors[v as usize].len() {
            let w = self.neighbors[v as usize][idx];
            let pos = self.positions.get(&Chord::new(v, w)).copied();
            if even && pos.is_none() {
                continue;
            }
            let next_last = match pos {
                Some(p) if last.map_or(false, |l| p <= l) => continue,
                Some(p) => Some(p),
                None => last,
            };
            seq.push(w);
            if seq.len() % 2 == 0 && w == self.j {
                f(seq);
                found = true;
            }
            if seq.len() < 2 * (self.crossing_count + 1) && self.walk(seq, next_last, viable, f) {
                found = true;
            }
            seq.pop();
        }
        viable[key] = Some(found);
        found
    }
}

pub fn enumerate_admissible(tri: &Triangulation, i: u32, j: u32) -> Vec<AdmissibleSequence> {
    let mut out = Vec::new();
    AdmissibleSearch::new(tri, i, j).for_each(|s| out.push(AdmissibleSequence(s.to_vec())));
    out
}

/// `x_{i1 i2} x_{i3 i2}^-1 x_{i3 i4} ...` over oriented-edge symbols, unreduced letter list.
pub fn monomial_letters(seq: &[u32]) -> Vec<Letter> {
    (0..seq.len() - 1)
        .map(|s| {
            if s % 2 == 0 {
                Letter::new(Symbol::Edge(seq[s], seq[s + 1]), 1)
            } else {
                Letter::new(Symbol::Edge(seq[s + 1], seq[s]), -1)
            }
        })
        .collect()
}

pub fn x_monomial(seq: &AdmissibleSequence) -> Word {
    crate::wordcore::reduce(monomial_letters(&seq.0))
}

/// Sum of monomials where each oriented polygon edge `(a,b)` is replaced by `edge_word(a,b)`.
pub fn expand_with<F>(tri: &Triangulation, p: u32, q: u32, mut edge_word: F) -> AlgebraElement
where
    F: FnMut(u32, u32) -> Word,
{
    let mut cache: HashMap<(u32, u32), Word> = HashMap::new();
    let mut out = AlgebraElement::zero();
    AdmissibleSearch::new(tri, p, q).for_each(|seq| {
        let mut w = Word::empty();
        for l in monomial_letters(seq) {
            let Symbol::Edge(a, b) = l.sym else { unreachable!() };
            let img = cache.entry((a, b)).or_insert_with(|| edge_word(a, b));
            if l.exp == 1 {
                w.append(img);
            } else {
                w.append_inv(img);
            }
        }
        out.add_term(w, BigInt::one());
    });
    out
}

/// Expansion over the oriented edges of `tri`, before rewriting to a basis.
pub fn expand_x_raw(tri: &Triangulation, p: u32, q: u32) -> AlgebraElement {
    expand_with(tri, p, q, |a, b| Word::gen(Symbol::Edge(a, b)))
}

/// The element `t^Δ_pq` over the free basis of the triangle group.
pub fn expand_x(tri: &Triangulation, p: u32, q: u32, rw: &Rewriter) -> AlgebraElement {
    expand_with(tri, p, q, |a, b| rw.edge(a, b).clone())
}

/// `y_kj^i` as a sum over `Adm(i,j)` of sector products; needs `(i,k)` in the triangulation.
pub fn expand_y(tri: &Triangulation, i: u32, j: u32, k: u32, rw: &Rewriter) -> Result<AlgebraElement, PresentationError> {
    if !tri.has_edge(i, k) {
        return Err(PresentationError::EdgeNotInTriangulation(i, k));
    }
    if i == j {
        return Err(PresentationError::EdgeNotInTriangulation(i, j));
    }
    let mut out = AlgebraElement::zero();
    let mut err = None;
    AdmissibleSearch::new(tri, i, j).for_each(|seq| {
        let mut shifted = Vec::with_capacity(seq.len() + 1);
        shifted.push(k);
        shifted.extend_from_slice(seq);
        let mut w = Word::empty();
        let mut s = 0;
        while s + 2 < shifted.len() {
            match sector_word(tri, rw, shifted[s], shifted[s + 2], shifted[s + 1]) {
                Ok(y) => w.append(&y),
                Err(e) => err = Some(e),
            }
            s += 2;
        }
        out.add_term(w, BigInt::one());
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Evaluation of an element in a commutative specialization.
pub fn abelianize<F>(a: &AlgebraElement, mut value: F) -> BigRational
where
    F: FnMut(Symbol) -> BigRational,
{
    let mut total = BigRational::zero();
    for (w, c) in a.terms() {
        let mut m = BigRational::from_integer(c.clone());
        for l in w.letters() {
            let v = value(l.sym);
            m = if l.exp == 1 { m * v } else { m / v };
        }
        total += m;
    }
    total
}

/// Commutative length of `(p,q)` by flipping toward a triangulation containing it.
pub fn ptolemy_eval(tri: &Triangulation, edge_values: &BTreeMap<Chord, BigRational>, p: u32, q: u32) -> BigRational {
    assert_ne!(p, q);
    let mut values = edge_values.clone();
    let mut cur = tri.clone();
    let target = Chord::new(p, q);
    let val = |m: &BTreeMap<Chord, BigRational>, a: u32, b: u32| -> BigRational {
        m.get(&Chord::new(a, b)).cloned().unwrap_or_else(|| panic!("no value for edge {{{a},{b}}}"))
    };
    while !cur.has_edge(p, q) {
        let n = cur.n();
        let crossing: Vec<Chord> = cur.diagonals().iter().copied().filter(|&d| crosses(d, target, n)).collect();
        let first = crossing_order(p, q, &crossing, n).expect("crossing")[0];
        let flip = cur.flip(first).expect("diagonal");
        let [i, j, k, l] = flip.quad;
        // x_ik x_jl = x_ij x_kl + x_il x_jk
        let num = val(&values, i, j) * val(&values, k, l) + val(&values, i, l) * val(&values, j, k);
        let new_val = num / val(&values, i, k);
        values.insert(flip.new_diagonal, new_val);
        cur = flip.triangulation;
    }
    val(&values, p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::rewriter;

    fn tri(s: &str) -> Triangulation {
        s.parse().unwrap()
    }

    fn seqs(t: &Triangulation, i: u32, j: u32) -> Vec<Vec<u32>> {
        enumerate_admissible(t, i, j).into_iter().map(|s| s.0).collect()
    }

    #[test]
    fn pentagon_sequences() {
        let t = tri("n=5;diag=1-3,1-4");
        let mut got = seqs(&t, 2, 5);
        got.sort();
        assert_eq!(got, vec![vec![2, 1, 3, 4, 1, 5], vec![2, 1, 4, 5], vec![2, 3, 1, 5]]);
    }

    #[test]
    fn edge_gives_singleton() {
        let t = tri("n=6;diag=1-3,3-6,4-6");
        for (a, b) in t.oriented_edges() {
            assert_eq!(seqs(&t, a, b), vec![vec![a, b]]);
        }
    }

    #[test]
    fn starlike_counts() {
        for n in 4..=8 {
            let t = Triangulation::starlike(n, 1);
            for i in 2..n {
                for j in i + 1..n {
                    assert_eq!(seqs(&t, i, j).len() as u32, j - i, "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn monomial_shapes() {
        let w = x_monomial(&AdmissibleSequence(vec![2, 1, 4, 5]));
        assert_eq!(w.to_string(), "t(2,1).t(4,1)^-1.t(4,5)");
        let w = x_monomial(&AdmissibleSequence(vec![2, 1, 3, 4, 1, 5]));
        assert_eq!(w.to_string(), "t(2,1).t(3,1)^-1.t(3,4).t(1,4)^-1.t(1,5)");
        assert_eq!(x_monomial(&AdmissibleSequence(vec![3, 4])).to_string(), "t(3,4)");
    }

    #[test]
    fn ptolemy_square() {
        let t = tri("n=4;diag=1-3");
        let vals: BTreeMap<Chord, BigRational> = [(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)]
            .iter()
            .map(|&(a, b)| (Chord::new(a, b), BigRational::one()))
            .collect();
        assert_eq!(ptolemy_eval(&t, &vals, 2, 4), BigRational::from_integer(2.into()));
        assert_eq!(ptolemy_eval(&t, &vals, 1, 3), BigRational::one());
    }

    #[test]
    fn y_expansion_requires_edge() {
        let t = tri("n=5;diag=1-3,1-4");
        let rw = rewriter(&t);
        assert!(expand_y(&t, 2, 5, 4, &rw).is_err());
        assert_eq!(expand_y(&t, 2, 5, 1, &rw).unwrap().len(), 3);
    }
}
