//! Convex polygon combinatorics: chords, triangulations, flips and the
//! order in which chords meet a fixed segment.
//!
//! Vertices are labelled `1..=n` in cyclic order. Every predicate here is a
//! cyclic-interval test; there is no floating point.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolygonError {
    #[error("{0} is not a diagonal of the triangulation")]
    NotADiagonal(Chord),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("cannot parse triangulation: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
}

/// Unordered pair of distinct vertices, stored with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Chord {
    pub a: u32,
    pub b: u32,
}

impl Chord {
    pub fn new(i: u32, j: u32) -> Chord {
        assert_ne!(i, j, "chord endpoints must differ");
        Chord { a: i.min(j), b: i.max(j) }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.a == v || self.b == v
    }

    pub fn other(&self, v: u32) -> u32 {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    pub fn is_boundary(&self, n: u32) -> bool {
        self.b - self.a == 1 || (self.a == 1 && self.b == n)
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.a, self.b)
    }
}

/// True iff `x` lies strictly inside the cyclic interval from `a` to `b`
/// walking in the increasing direction.
pub fn strictly_between(a: u32, x: u32, b: u32, n: u32) -> bool {
    let d = (x + n - a) % n;
    let span = (b + n - a) % n;
    0 < d && d < span
}

/// Interior crossing: four distinct endpoints that interleave cyclically.
pub fn crosses(c1: Chord, c2: Chord, n: u32) -> bool {
    if c1.contains(c2.a) || c1.contains(c2.b) {
        return false;
    }
    strictly_between(c1.a, c2.a, c1.b, n) != strictly_between(c1.a, c2.b, c1.b, n)
}

/// Triangulation of a convex `n`-gon, stored as its sorted diagonal list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Triangulation {
    n: u32,
    diagonals: Vec<Chord>,
}

/// Result of flipping a diagonal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Flip {
    pub triangulation: Triangulation,
    pub new_diagonal: Chord,
    /// Cyclic quadruple `(i,j,k,l)` with the old diagonal `{i,k}` and the new one `{j,l}`.
    pub quad: [u32; 4],
}

impl Triangulation {
    pub fn new(n: u32, diagonals: impl IntoIterator<Item = Chord>) -> Result<Triangulation, PolygonError> {
        if n < 3 {
            return Err(PolygonError::InvalidTriangulation(format!("n = {n} < 3")));
        }
        let set: BTreeSet<Chord> = diagonals.into_iter().collect();
        let diagonals: Vec<Chord> = set.into_iter().collect();
        for d in &diagonals {
            if d.a < 1 || d.b > n {
                return Err(PolygonError::InvalidTriangulation(format!("{d} out of range for n = {n}")));
            }
            if d.is_boundary(n) {
                return Err(PolygonError::InvalidTriangulation(format!("{d} is a boundary edge")));
            }
        }
        for (k, d) in diagonals.iter().enumerate() {
            for e in &diagonals[k + 1..] {
                if crosses(*d, *e, n) {
                    return Err(PolygonError::InvalidTriangulation(format!("{d} crosses {e}")));
                }
            }
        }
        if diagonals.len() != (n - 3) as usize {
            return Err(PolygonError::InvalidTriangulation(format!(
                "expected {} diagonals, got {}",
                n - 3,
                diagonals.len()
            )));
        }
        Ok(Triangulation { n, diagonals })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn diagonals(&self) -> &[Chord] {
        &self.diagonals
    }

    pub fn is_diagonal(&self, c: Chord) -> bool {
        self.diagonals.binary_search(&c).is_ok()
    }

    /// Boundary edge or diagonal.
    pub fn has_edge(&self, i: u32, j: u32) -> bool {
        if i == j || i < 1 || j < 1 || i > self.n || j > self.n {
            return false;
        }
        let c = Chord::new(i, j);
        c.is_boundary(self.n) || self.is_diagonal(c)
    }

    pub fn boundary(&self) -> Vec<Chord> {
        (1..=self.n).map(|i| Chord::new(i, i % self.n + 1)).collect()
    }

    /// All `4n-6` oriented edges, sorted.
    pub fn oriented_edges(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self
            .boundary()
            .into_iter()
            .chain(self.diagonals.iter().copied())
            .flat_map(|c| [(c.a, c.b), (c.b, c.a)])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        (1..=self.n).filter(|&w| self.has_edge(v, w)).collect()
    }

    /// Faces as ascending triples (which is also their cyclic order).
    pub fn triangles(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::with_capacity(self.n as usize - 2);
        for a in 1..=self.n {
            let nb: Vec<u32> = self.neighbors(a).into_iter().filter(|&x| x > a).collect();
            for (k, &b) in nb.iter().enumerate() {
                for &c in &nb[k + 1..] {
                    if self.has_edge(b, c) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    pub fn is_face(&self, i: u32, j: u32, k: u32) -> bool {
        let mut t = [i, j, k];
        t.sort_unstable();
        t[0] != t[1] && t[1] != t[2] && self.has_edge(t[0], t[1]) && self.has_edge(t[1], t[2]) && self.has_edge(t[0], t[2])
    }

    pub fn starlike(n: u32, i: u32) -> Triangulation {
        assert!(n >= 3 && (1..=n).contains(&i));
        let diags = (1..=n)
            .filter(|&j| j != i)
            .map(|j| Chord::new(i, j))
            .filter(|c| !c.is_boundary(n));
        Triangulation::new(n, diags).expect("starlike triangulation is valid")
    }

    pub fn flip(&self, d: Chord) -> Result<Flip, PolygonError> {
        if !self.is_diagonal(d) {
            return Err(PolygonError::NotADiagonal(d));
        }
        let apexes: Vec<u32> = (1..=self.n)
            .filter(|&v| !d.contains(v) && self.has_edge(v, d.a) && self.has_edge(v, d.b))
            .collect();
        debug_assert_eq!(apexes.len(), 2);
        let (j, l) = if strictly_between(d.a, apexes[0], d.b, self.n) {
            (apexes[0], apexes[1])
        } else {
            (apexes[1], apexes[0])
        };
        let new_diagonal = Chord::new(j, l);
        let diags = self.diagonals.iter().map(|&c| if c == d { new_diagonal } else { c });
        Ok(Flip {
            triangulation: Triangulation::new(self.n, diags).expect("flip preserves validity"),
            new_diagonal,
            quad: [d.a, j, d.b, l],
        })
    }

    /// Every triangulation of the `n`-gon, in a fixed order.
    pub fn all(n: u32) -> Vec<Triangulation> {
        fn rec(vs: &[u32]) -> Vec<Vec<Chord>> {
            if vs.len() < 3 {
                return vec![vec![]];
            }
            let (a, b) = (vs[0], vs[vs.len() - 1]);
            let mut out = Vec::new();
            for k in 1..vs.len() - 1 {
                let c = vs[k];
                let left = rec(&vs[..=k]);
                let right = rec(&vs[k..]);
                for l in &left {
                    for r in &right {
                        let mut d = Vec::with_capacity(l.len() + r.len() + 2);
                        if k > 1 {
                            d.push(Chord::new(a, c));
                        }
                        if k < vs.len() - 2 {
                            d.push(Chord::new(c, b));
                        }
                        d.extend_from_slice(l);
                        d.extend_from_slice(r);
                        out.push(d);
                    }
                }
            }
            out
        }
        assert!(n >= 3);
        let vs: Vec<u32> = (1..=n).collect();
        let mut out: Vec<Triangulation> = rec(&vs)
            .into_iter()
            .map(|d| Triangulation::new(n, d).expect("enumerated triangulation is valid"))
            .collect();
        out.sort();
        out
    }

    /// Deterministic pseudo-random triangulation.
    pub fn random(n: u32, seed: u64) -> Triangulation {
        assert!(n >= 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut diags = Vec::new();
        let mut stack = vec![(1..=n).collect::<Vec<u32>>()];
        while let Some(vs) = stack.pop() {
            if vs.len() < 3 {
                continue;
            }
            let k = rng.gen_range(1..vs.len() - 1);
            let (a, b, c) = (vs[0], vs[vs.len() - 1], vs[k]);
            if k > 1 {
                diags.push(Chord::new(a, c));
            }
            if k < vs.len() - 2 {
                diags.push(Chord::new(c, b));
            }
            stack.push(vs[..=k].to_vec());
            stack.push(vs[k..].to_vec());
        }
        Triangulation::new(n, diags).expect("random triangulation is valid")
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};diag=", self.n)?;
        for (k, d) in self.diagonals.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}-{}", d.a, d.b)?;
        }
        Ok(())
    }
}

impl FromStr for Triangulation {
    type Err = PolygonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, tail) = compact
            .split_once(';')
            .ok_or_else(|| PolygonError::Parse(format!("missing ';' in {s:?}")))?;
        let n: u32 = head
            .strip_prefix("n=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| PolygonError::Parse(format!("bad size field {head:?}")))?;
        let list = tail
            .strip_prefix("diag=")
            .ok_or_else(|| PolygonError::Parse(format!("bad diagonal field {tail:?}")))?;
        let mut diags = Vec::new();
        for item in list.split(',').filter(|p| !p.is_empty()) {
            let (a, b) = item
                .split_once('-')
                .and_then(|(a, b)| Some((a.parse::<u32>().ok()?, b.parse::<u32>().ok()?)))
                .ok_or_else(|| PolygonError::Parse(format!("bad diagonal {item:?}")))?;
            if a == b {
                return Err(PolygonError::Parse(format!("degenerate diagonal {item:?}")));
            }
            diags.push(Chord::new(a, b));
        }
        Triangulation::new(n, diags)
    }
}

/// Sorts chords crossing the segment `(p,q)` by where they meet it, nearest to `p` first.
///
/// `c1` comes before `c2` exactly when `c1` separates `p` from `c2`.
pub fn crossing_order(p: u32, q: u32, chords: &[Chord], n: u32) -> Result<Vec<Chord>, PolygonError> {
    let seg = Chord::new(p, q);
    for &c in chords {
        if !crosses(c, seg, n) {
            return Err(PolygonError::PreconditionViolation(format!("{c} does not cross ({p},{q})")));
        }
    }
    let side = |c: Chord, x: u32| strictly_between(c.a, x, c.b, n);
    let mut out = chords.to_vec();
    out.sort_by(|&c1, &c2| {
        if c1 == c2 {
            return Ordering::Equal;
        }
        let x = if c1.contains(c2.a) { c2.b } else { c2.a };
        if side(c1, p) != side(c1, x) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    });
    Ok(out)
}
