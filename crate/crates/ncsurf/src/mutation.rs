//! Flip homomorphisms between neighbouring triangulations and their composites.

use std::collections::{BTreeMap, HashMap, VecDeque};

use thiserror::Error;

use crate::oracle::{MatrixAssignment, OracleError};
use crate::polygon::{Chord, PolygonError, Triangulation};
use crate::presentation::{rewriter, Rewriter};
use crate::wordcore::{AlgebraElement, Symbol, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MutationError {
    #[error("substitution needs the inverse of a non-unit image: {0}")]
    NonUnitInverse(String),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error("triangulations have different sizes")]
    SizeMismatch,
}

impl From<WordError> for MutationError {
    fn from(e: WordError) -> Self {
        match e {
            WordError::NotAUnit(s) => MutationError::NonUnitInverse(s),
        }
    }
}

/// Homomorphism from the triangle group algebra of `source` to that of
/// `target = flip(source, d)`, sending each source edge to its expansion in
/// the target.
#[derive(Clone, Debug)]
pub struct FlipHom {
    pub source: Triangulation,
    pub target: Triangulation,
    /// `(i,j,k,l)`: `{i,k}` is the diagonal of the target, `{j,l}` that of the source.
    pub quad: [u32; 4],
    pub source_rw: Rewriter,
    pub target_rw: Rewriter,
    images: BTreeMap<Symbol, AlgebraElement>,
}

pub fn flip_hom(source: &Triangulation, d: Chord) -> Result<FlipHom, MutationError> {
    let flip = source.flip(d)?;
    // flip() reports (a,b,c,d) with the flipped diagonal {a,c}
    let [a, b, c, dd] = flip.quad;
    let (i, j, k, l) = (dd, a, b, c);
    let target = flip.triangulation;
    let target_rw = rewriter(&target);
    let source_rw = rewriter(source);
    let e = |x: u32, y: u32| target_rw.edge(x, y).clone();
    let path = |x: (u32, u32), y: (u32, u32), z: (u32, u32)| {
        let mut w = e(x.0, x.1);
        w.append_inv(&e(y.0, y.1));
        w.append(&e(z.0, z.1));
        w
    };
    let mut images = BTreeMap::new();
    for (x, y) in source.oriented_edges() {
        let img = if (x, y) == (j, l) {
            AlgebraElement::from_words([path((j, k), (i, k), (i, l)), path((j, i), (k, i), (k, l))])
        } else if (x, y) == (l, j) {
            AlgebraElement::from_words([path((l, i), (k, i), (k, j)), path((l, k), (i, k), (i, j))])
        } else {
            AlgebraElement::from_word(e(x, y))
        };
        images.insert(Symbol::Edge(x, y), img);
    }
    Ok(FlipHom { source: source.clone(), target, quad: [i, j, k, l], source_rw, target_rw, images })
}

impl FlipHom {
    pub fn image(&self, s: Symbol) -> Option<&AlgebraElement> {
        self.images.get(&s)
    }

    pub fn images(&self) -> &BTreeMap<Symbol, AlgebraElement> {
        &self.images
    }

    /// Applies the homomorphism to an element written in source edge symbols
    /// (basis letters or any other oriented edge of the source).
    pub fn apply(&self, p: &AlgebraElement) -> Result<AlgebraElement, MutationError> {
        Ok(p.substitute(|s| {
            self.images.get(&s).cloned().unwrap_or_else(|| panic!("{s} is not an edge of the source"))
        })?)
    }

    /// Matrices for every source edge, from matrices for the target basis.
    pub fn pull_back(&self, target: &MatrixAssignment) -> Result<MatrixAssignment, OracleError> {
        let imgs: HashMap<Symbol, AlgebraElement> = self.images.iter().map(|(k, v)| (*k, v.clone())).collect();
        crate::oracle::pull_back(target, &imgs)
    }
}

/// Composite of flip homomorphisms along a path in the flip graph.
#[derive(Clone, Debug)]
pub struct PsiChain {
    pub from: Triangulation,
    pub to: Triangulation,
    pub steps: Vec<FlipHom>,
}

impl PsiChain {
    pub fn path(&self) -> Vec<Triangulation> {
        let mut out = vec![self.from.clone()];
        out.extend(self.steps.iter().map(|h| h.target.clone()));
        out
    }

    /// Symbolic composite; fails as soon as some step needs a non-unit inverse.
    pub fn apply(&self, p: &AlgebraElement) -> Result<AlgebraElement, MutationError> {
        let mut cur = p.clone();
        for h in &self.steps {
            cur = h.apply(&cur)?;
        }
        Ok(cur)
    }

    /// Matrices for every edge of `from`, given matrices on the basis of `to`.
    pub fn pull_back(&self, target: &MatrixAssignment) -> Result<MatrixAssignment, OracleError> {
        let mut cur = target.clone();
        for h in self.steps.iter().rev() {
            cur = h.pull_back(&cur)?;
        }
        Ok(cur)
    }
}

/// Composite along an explicit path of adjacent triangulations.
pub fn psi_along(path: &[Triangulation]) -> Result<PsiChain, MutationError> {
    assert!(!path.is_empty());
    let mut steps = Vec::new();
    for w in path.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.n() != b.n() {
            return Err(MutationError::SizeMismatch);
        }
        let d = a
            .diagonals()
            .iter()
            .copied()
            .find(|d| !b.is_diagonal(*d))
            .ok_or_else(|| PolygonError::PreconditionViolation("consecutive triangulations are equal".into()))?;
        let h = flip_hom(a, d)?;
        if &h.target != b {
            return Err(PolygonError::PreconditionViolation("path steps must be single flips".into()).into());
        }
        steps.push(h);
    }
    Ok(PsiChain { from: path[0].clone(), to: path[path.len() - 1].clone(), steps })
}

/// Shortest flip path, exploring flips in increasing diagonal order.
pub fn flip_path(from: &Triangulation, to: &Triangulation) -> Result<Vec<Triangulation>, MutationError> {
    if from.n() != to.n() {
        return Err(MutationError::SizeMismatch);
    }
    let mut parent: HashMap<Triangulation, Triangulation> = HashMap::new();
    let mut queue = VecDeque::from([from.clone()]);
    parent.insert(from.clone(), from.clone());
    while let Some(cur) = queue.pop_front() {
        if &cur == to {
            break;
        }
        for &d in cur.diagonals() {
            let next = cur.flip(d)?.triangulation;
            if !parent.contains_key(&next) {
                parent.insert(next.clone(), cur.clone());
                queue.push_back(next);
            }
        }
    }
    let mut path = vec![to.clone()];
    while path.last().unwrap() != from {
        let p = parent[path.last().unwrap()].clone();
        path.push(p);
    }
    path.reverse();
    Ok(path)
}

pub fn psi_chain(from: &Triangulation, to: &Triangulation) -> Result<PsiChain, MutationError> {
    psi_along(&flip_path(from, to)?)
}
