//! Triangle groups: free bases by relation solving, noncommutative angles
//! and sectors, the big triangle group and its retraction onto a
//! triangulation.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::polygon::{Chord, Triangulation};
use crate::wordcore::{AlgebraElement, Letter, Symbol, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("elimination stuck with unknowns left: {0:?}")]
    EliminationStuck(Vec<String>),
    #[error("({0},{1},{2}) is not a face of the triangulation")]
    NotATriangle(u32, u32, u32),
    #[error("oriented edge ({0},{1}) is not in the triangulation")]
    EdgeNotInTriangulation(u32, u32),
    #[error("invalid directed triangulation: {0}")]
    InvalidDirection(String),
    #[error("symbol {0} has no rewriting rule")]
    UnknownSymbol(String),
}

pub fn t(i: u32, j: u32) -> Word {
    Word::gen(Symbol::Edge(i, j))
}

/// The six oriented edges of the triangle relator
/// `t_ij t_kj^-1 t_ki t_ji^-1 t_jk t_ik^-1`, with exponents.
pub fn triangle_relator(i: u32, j: u32, k: u32) -> [((u32, u32), i8); 6] {
    [((i, j), 1), ((k, j), -1), ((k, i), 1), ((j, i), -1), ((j, k), 1), ((i, k), -1)]
}

pub fn triangle_relator_word(i: u32, j: u32, k: u32) -> Word {
    crate::wordcore::reduce(triangle_relator(i, j, k).iter().map(|&((a, b), e)| Letter::new(Symbol::Edge(a, b), e)))
}

/// A free basis of a one-relator-per-triangle group together with a word
/// over that basis for every generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rewriter {
    basis: Vec<Symbol>,
    rules: BTreeMap<Symbol, Word>,
}

impl Rewriter {
    pub fn basis(&self) -> &[Symbol] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn rules(&self) -> &BTreeMap<Symbol, Word> {
        &self.rules
    }

    pub fn rule(&self, s: Symbol) -> Option<&Word> {
        self.rules.get(&s)
    }

    /// Rule for an oriented polygon edge. Panics if the edge is unknown.
    pub fn edge(&self, i: u32, j: u32) -> &Word {
        self.rules
            .get(&Symbol::Edge(i, j))
            .unwrap_or_else(|| panic!("edge ({i},{j}) is not in the triangulation"))
    }

    pub fn try_rewrite_word(&self, w: &Word) -> Result<Word, PresentationError> {
        for s in w.symbols() {
            if !self.rules.contains_key(&s) {
                return Err(PresentationError::UnknownSymbol(s.to_string()));
            }
        }
        Ok(self.rewrite_word(w))
    }

    /// Panics on symbols without a rule.
    pub fn rewrite_word(&self, w: &Word) -> Word {
        w.substitute(|s| {
            self.rules
                .get(&s)
                .cloned()
                .unwrap_or_else(|| panic!("symbol {s} has no rewriting rule"))
        })
    }

    pub fn rewrite(&self, a: &AlgebraElement) -> AlgebraElement {
        a.map_words(|w| self.rewrite_word(w))
    }
}

/// Solves the relators for the unknown generators by repeated
/// single-unknown elimination. The remaining generators form the basis.
pub fn solve_relators(
    generators: &[Symbol],
    unknowns: &[Symbol],
    relators: &[Vec<Letter>],
) -> Result<Rewriter, PresentationError> {
    let mut todo: BTreeSet<Symbol> = unknowns.iter().copied().collect();
    let basis: Vec<Symbol> = generators.iter().copied().filter(|g| !todo.contains(g)).collect();
    let mut rules: BTreeMap<Symbol, Word> = basis.iter().map(|&g| (g, Word::gen(g))).collect();
    let mut pending: Vec<&Vec<Letter>> = relators.iter().collect();
    while !todo.is_empty() {
        let mut progress = false;
        pending.retain(|rel| {
            let unknown_positions: Vec<usize> =
                rel.iter().enumerate().filter(|(_, l)| todo.contains(&l.sym)).map(|(p, _)| p).collect();
            if unknown_positions.len() != 1 || rel.iter().any(|l| !todo.contains(&l.sym) && !rules.contains_key(&l.sym)) {
                return true;
            }
            let p = unknown_positions[0];
            let eval = |ls: &[Letter]| {
                let mut w = Word::empty();
                for l in ls {
                    if l.exp == 1 {
                        w.append(&rules[&l.sym]);
                    } else {
                        w.append_inv(&rules[&l.sym]);
                    }
                }
                w
            };
            // P u^e Q = 1  =>  u^e = P^-1 Q^-1
            let before = eval(&rel[..p]);
            let after = eval(&rel[p + 1..]);
            let mut val = before.inv();
            val.append_inv(&after);
            let l = rel[p];
            rules.insert(l.sym, if l.exp == 1 { val } else { val.inv() });
            todo.remove(&l.sym);
            progress = true;
            false
        });
        if !progress {
            return Err(PresentationError::EliminationStuck(todo.iter().map(|s| s.to_string()).collect()));
        }
    }
    Ok(Rewriter { basis, rules })
}

/// One orientation per diagonal plus a dropped boundary edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedTriangulation {
    base: Triangulation,
    chosen: Vec<(u32, u32)>,
    dropped: (u32, u32),
}

impl DirectedTriangulation {
    /// Keeps `(min,max)` for every diagonal and drops `(1,2)`.
    pub fn canonical(base: &Triangulation) -> DirectedTriangulation {
        DirectedTriangulation {
            base: base.clone(),
            chosen: base.diagonals().iter().map(|d| (d.a, d.b)).collect(),
            dropped: (1, 2),
        }
    }

    pub fn new(
        base: &Triangulation,
        chosen: Vec<(u32, u32)>,
        dropped: (u32, u32),
    ) -> Result<DirectedTriangulation, PresentationError> {
        let n = base.n();
        if dropped.0 == dropped.1 || !base.has_edge(dropped.0, dropped.1) || !Chord::new(dropped.0, dropped.1).is_boundary(n) {
            return Err(PresentationError::InvalidDirection(format!("{dropped:?} is not a boundary edge")));
        }
        let got: BTreeSet<Chord> = chosen.iter().map(|&(a, b)| Chord::new(a, b)).collect();
        let want: BTreeSet<Chord> = base.diagonals().iter().copied().collect();
        if got != want || chosen.len() != want.len() {
            return Err(PresentationError::InvalidDirection(
                "need exactly one orientation of every diagonal".into(),
            ));
        }
        Ok(DirectedTriangulation { base: base.clone(), chosen, dropped })
    }

    pub fn base(&self) -> &Triangulation {
        &self.base
    }

    pub fn dropped(&self) -> (u32, u32) {
        self.dropped
    }

    /// Both orientations of every boundary edge and the chosen diagonal orientations.
    pub fn members(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> =
            self.base.boundary().iter().flat_map(|c| [(c.a, c.b), (c.b, c.a)]).collect();
        out.extend_from_slice(&self.chosen);
        out.sort_unstable();
        out
    }
}

pub fn build_rewriter(dt: &DirectedTriangulation) -> Result<Rewriter, PresentationError> {
    let tri = dt.base();
    let generators: Vec<Symbol> = tri.oriented_edges().into_iter().map(|(a, b)| Symbol::Edge(a, b)).collect();
    let mut unknowns: Vec<Symbol> = dt.chosen.iter().map(|&(a, b)| Symbol::Edge(b, a)).collect();
    unknowns.push(Symbol::Edge(dt.dropped.0, dt.dropped.1));
    let relators: Vec<Vec<Letter>> = tri
        .triangles()
        .into_iter()
        .map(|(i, j, k)| {
            triangle_relator(i, j, k).iter().map(|&((a, b), e)| Letter::new(Symbol::Edge(a, b), e)).collect()
        })
        .collect();
    solve_relators(&generators, &unknowns, &relators)
}

/// Rewriter for the canonical directed triangulation.
pub fn rewriter(tri: &Triangulation) -> Rewriter {
    build_rewriter(&DirectedTriangulation::canonical(tri)).expect("elimination succeeds on polygons")
}

/// Angle `T_i^{jk} = x_ji^-1 x_jk x_ik^-1` of a face, over the basis.
pub fn angle_word(tri: &Triangulation, rw: &Rewriter, (i, j, k): (u32, u32, u32)) -> Result<Word, PresentationError> {
    if !tri.is_face(i, j, k) {
        return Err(PresentationError::NotATriangle(i, j, k));
    }
    let mut w = rw.edge(j, i).inv();
    w.append(rw.edge(j, k));
    w.append_inv(rw.edge(i, k));
    Ok(w)
}

/// Sector `y_ij^k = x_ki^-1 x_kj`, over the basis.
pub fn sector_word(tri: &Triangulation, rw: &Rewriter, i: u32, j: u32, k: u32) -> Result<Word, PresentationError> {
    if i == j {
        return Ok(Word::empty());
    }
    for (a, b) in [(k, i), (k, j)] {
        if !tri.has_edge(a, b) {
            return Err(PresentationError::EdgeNotInTriangulation(a, b));
        }
    }
    let mut w = rw.edge(k, i).inv();
    w.append(rw.edge(k, j));
    Ok(w)
}

/// Sum of the angles at `i` over all faces containing `i`.
pub fn total_angle(tri: &Triangulation, rw: &Rewriter, i: u32) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (a, b, c) in tri.triangles() {
        let face = if a == i {
            (a, b, c)
        } else if b == i {
            (b, a, c)
        } else if c == i {
            (c, a, b)
        } else {
            continue;
        };
        out.add_term(angle_word(tri, rw, face).expect("face"), 1.into());
    }
    out
}

/// Relators of the big triangle group, one per triple `2 <= i < j < k <= n`.
pub fn big_triangle_relations(n: u32) -> Vec<Word> {
    let mut out = Vec::new();
    for i in 2..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                let lhs = [(i, 1, 1), (j, 1, -1), (j, k, 1), (1, k, -1), (1, j, 1), (i, j, -1), (i, k, 1)];
                let rhs = [(i, k, 1), (1, k, -1), (1, j, 1), (i, j, -1), (i, 1, 1), (j, 1, -1), (j, k, 1)];
                let word = |letters: &[(u32, u32, i8)]| {
                    crate::wordcore::reduce(letters.iter().map(|&(a, b, e)| Letter::new(Symbol::Edge(a, b), e)))
                };
                out.push(word(&lhs).mul(&word(&rhs).inv()));
            }
        }
    }
    out
}

/// Images of all `t_ij` under the retraction onto the triangle group of `tri`,
/// built by removing ears one at a time.
pub fn retraction_tau(tri: &Triangulation, rw: &Rewriter) -> BTreeMap<(u32, u32), Word> {
    let mut order: Vec<u32> = (1..=tri.n()).collect();
    let mut removed = Vec::new();
    // peel ears, largest label first, down to a triangle
    while order.len() > 3 {
        let m = order.len();
        let pos = (0..m)
            .rev()
            .find(|&p| {
                let (a, b) = (order[(p + m - 1) % m], order[(p + 1) % m]);
                tri.has_edge(a, b)
            })
            .expect("every polygon triangulation has an ear");
        let v = order.remove(pos);
        let m = order.len();
        let a = order[(pos + m - 1) % m];
        let b = order[pos % m];
        removed.push((v, a, b));
    }
    let mut tau: BTreeMap<(u32, u32), Word> = BTreeMap::new();
    for &x in &order {
        for &y in &order {
            if x != y {
                tau.insert((x, y), rw.edge(x, y).clone());
            }
        }
    }
    let mut present = order.clone();
    for &(v, a, b) in removed.iter().rev() {
        for (x, y) in [(v, a), (a, v), (v, b), (b, v)] {
            tau.insert((x, y), rw.edge(x, y).clone());
        }
        for &i in &present {
            if i == a || i == b {
                continue;
            }
            // tau_{i,v} = tau_{i,a} tau_{b,a}^-1 tau_{b,v}
            let mut w = tau[&(i, a)].clone();
            w.append_inv(&tau[&(b, a)]);
            w.append(&tau[&(b, v)]);
            tau.insert((i, v), w);
            // tau_{v,i} = tau_{v,b} tau_{a,b}^-1 tau_{a,i}
            let mut w = tau[&(v, b)].clone();
            w.append_inv(&tau[&(a, b)]);
            w.append(&tau[&(a, i)]);
            tau.insert((v, i), w);
        }
        present.push(v);
    }
    tau
}
