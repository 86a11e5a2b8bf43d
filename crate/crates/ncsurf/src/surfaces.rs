//! Annulus, infinite strip and once-punctured polygon, each computed by
//! unfolding to a triangulated polygon; plus the triangle group rank formula.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::laurent::{expand_with, AdmissibleSearch};
use crate::oracle::{random_assignment, verify_with, FpAssignment, FpMat, Mat, MatrixAssignment, OracleError};
use crate::polygon::{Chord, Triangulation};
use crate::presentation::{solve_relators, triangle_relator, PresentationError, Rewriter};
use crate::wordcore::{
    reduce, stallings_membership, AlgebraElement, CylKind, Letter, PunctKind, StripKind, Symbol, Word,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("window [{lo},{hi}] does not contain [{need_lo},{need_hi}]")]
    WindowTooSmall { lo: i32, hi: i32, need_lo: i32, need_hi: i32 },
    #[error("conservation identity fails at index {0}")]
    ConservationViolated(i64),
    #[error("illegal surface: {0}")]
    IllegalSurface(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

fn relator_letters<F>(tri: [u32; 3], mut sym: F) -> Vec<Letter>
where
    F: FnMut(u32, u32) -> Letter,
{
    triangle_relator(0, 1, 2)
        .iter()
        .map(|&((a, b), e)| {
            let l = sym(tri[a as usize], tri[b as usize]);
            if e == 1 {
                l
            } else {
                l.inv()
            }
        })
        .collect()
}

fn word_of(l: Letter) -> Word {
    Word::letter(l.sym, l.exp)
}

// ---------------------------------------------------------------- annulus

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum CoverVertex {
    Top(i64),
    Bottom(i64),
}

/// Annulus with one marked point on the outer boundary and `r` on the inner one.
#[derive(Clone, Debug)]
pub struct CylinderModel {
    r: u32,
    rw: Rewriter,
}

fn cyl(kind: CylKind, i: i64) -> Symbol {
    Symbol::Cyl(kind, i as i32)
}

fn per(r: u32, m: i64) -> i64 {
    (m - 1).rem_euclid(r as i64) + 1
}

// deck-transformation projection of a lifted edge
fn cover_letter(r: u32, a: CoverVertex, b: CoverVertex) -> Letter {
    use CoverVertex::*;
    let ri = r as i64;
    match (a, b) {
        (Top(q), Bottom(m)) => Letter::new(cyl(CylKind::X, m - q * ri), 1),
        (Bottom(m), Top(q)) => Letter::new(cyl(CylKind::Xbar, m - q * ri), 1),
        (Top(p), Top(q)) if q == p + 1 => Letter::new(cyl(CylKind::D, 0), 1),
        (Top(p), Top(q)) if p == q + 1 => Letter::new(cyl(CylKind::Dbar, 0), 1),
        (Bottom(p), Bottom(q)) if q == p + 1 => Letter::new(cyl(CylKind::C, per(r, q)), 1),
        (Bottom(p), Bottom(q)) if p == q + 1 => Letter::new(cyl(CylKind::Cbar, per(r, p)), 1),
        _ => panic!("{a:?} and {b:?} are not adjacent in the cover"),
    }
}

impl CylinderModel {
    pub fn new(r: u32) -> Result<CylinderModel, SurfaceError> {
        assert!(r >= 1, "the inner boundary needs a marked point");
        let ri = r as i64;
        let mut gens = Vec::new();
        for n in 1..=ri + 1 {
            gens.push(cyl(CylKind::X, n));
            gens.push(cyl(CylKind::Xbar, n));
        }
        for i in 1..=ri {
            gens.push(cyl(CylKind::C, i));
            gens.push(cyl(CylKind::Cbar, i));
        }
        gens.push(cyl(CylKind::D, 0));
        gens.push(cyl(CylKind::Dbar, 0));
        let verts: Vec<CoverVertex> = std::iter::once(CoverVertex::Top(0))
            .chain(std::iter::once(CoverVertex::Top(1)))
            .chain((1..=ri + 1).map(CoverVertex::Bottom))
            .collect();
        let label = |v: CoverVertex| verts.iter().position(|&w| w == v).unwrap() as u32;
        let sym = |a: u32, b: u32| cover_letter(r, verts[a as usize], verts[b as usize]);
        let mut relators = Vec::new();
        for m in 1..=ri {
            let t = [CoverVertex::Top(0), CoverVertex::Bottom(m), CoverVertex::Bottom(m + 1)].map(label);
            relators.push(relator_letters(t, sym));
        }
        let t = [CoverVertex::Top(0), CoverVertex::Top(1), CoverVertex::Bottom(ri + 1)].map(label);
        relators.push(relator_letters(t, sym));
        let mut unknowns: Vec<Symbol> = (2..=ri + 1)
            .map(|m| if m % 2 == 0 { cyl(CylKind::Cbar, per(r, m)) } else { cyl(CylKind::C, per(r, m)) })
            .collect();
        unknowns.push(cyl(CylKind::X, 1));
        let rw = solve_relators(&gens, &unknowns, &relators)?;
        Ok(CylinderModel { r, rw })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn rewriter(&self) -> &Rewriter {
        &self.rw
    }

    pub fn rank(&self) -> usize {
        self.rw.rank()
    }

    /// Periodic index in `[1, r]`.
    pub fn per(&self, m: i64) -> i64 {
        per(self.r, m)
    }

    /// Rewritten image of a generator of the annulus presentation.
    pub fn generator(&self, s: Symbol) -> Word {
        let s = match s {
            Symbol::Cyl(k @ (CylKind::C | CylKind::Cbar), i) => cyl(k, self.per(i as i64)),
            other => other,
        };
        self.rw.rule(s).unwrap_or_else(|| panic!("{s} is not an annulus generator")).clone()
    }

    fn lifted_polygon(&self, n: i64) -> (Vec<CoverVertex>, Triangulation) {
        let r = self.r as i64;
        let f = (n - 1).div_euclid(r);
        let q0 = 0.min(f - 1);
        let q1 = 1.max(f + 1);
        let mut verts: Vec<CoverVertex> = (q0..=q1).map(CoverVertex::Top).collect();
        verts.extend((q0 * r + 1..=q1 * r + 1).rev().map(CoverVertex::Bottom));
        let size = verts.len() as u32;
        let label: HashMap<CoverVertex, u32> = verts.iter().enumerate().map(|(k, &v)| (v, k as u32 + 1)).collect();
        let mut diagonals = Vec::new();
        for q in q0..=q1 {
            for m in q * r + 1..=(q + 1) * r + 1 {
                if let Some(&b) = label.get(&CoverVertex::Bottom(m)) {
                    let c = Chord::new(label[&CoverVertex::Top(q)], b);
                    if !c.is_boundary(size) {
                        diagonals.push(c);
                    }
                }
            }
        }
        let tri = Triangulation::new(size, diagonals).expect("fan triangulation of the lifted strip");
        (verts, tri)
    }

    fn expand_lift(&self, from: CoverVertex, to: CoverVertex, n: i64) -> AlgebraElement {
        let (verts, tri) = self.lifted_polygon(n);
        let pos = |v: CoverVertex| verts.iter().position(|&w| w == v).unwrap() as u32 + 1;
        let (a, b) = (pos(from), pos(to));
        expand_with(&tri, a, b, |p, q| {
            let l = cover_letter(self.r, verts[p as usize - 1], verts[q as usize - 1]);
            self.rw.rewrite_word(&word_of(l))
        })
    }

    /// Expansion of the `n`-th curve, oriented from the outer marked point.
    pub fn x(&self, n: i64) -> AlgebraElement {
        self.expand_lift(CoverVertex::Top(0), CoverVertex::Bottom(n), n)
    }

    /// Expansion of the `n`-th curve, oriented towards the outer marked point.
    pub fn xbar(&self, n: i64) -> AlgebraElement {
        self.expand_lift(CoverVertex::Bottom(n), CoverVertex::Top(0), n)
    }

    /// `x_n` for even `n`, `x̄_n` for odd `n`.
    pub fn u(&self, n: i64) -> AlgebraElement {
        if n % 2 == 0 {
            self.x(n)
        } else {
            self.xbar(n)
        }
    }

    pub fn big_d(&self) -> Word {
        self.generator(cyl(CylKind::D, 0)).inv()
    }

    pub fn big_dbar(&self) -> Word {
        self.generator(cyl(CylKind::Dbar, 0)).inv()
    }

    /// `c_n` for even `n`, `c̄_n` for odd `n`.
    pub fn big_c(&self, n: i64) -> Word {
        let kind = if n % 2 == 0 { CylKind::C } else { CylKind::Cbar };
        self.generator(cyl(kind, n))
    }

    /// Indices of `U_a m U_b = C_n + U_c m' U_d`: `U_{n-r-1} D U_n = C_n + U_{n-1} D̄ U_{n-r}`
    /// for even `n`, `U_n D̄ U_{n-r-1} = C_n + U_{n-r} D U_{n-1}` for odd `n`.
    pub fn recursion_shape(&self, n: i64) -> ((i64, Word, i64), Word, (i64, Word, i64)) {
        let r = self.r as i64;
        if n % 2 == 0 {
            ((n - r - 1, self.big_d(), n), self.big_c(n), (n - 1, self.big_dbar(), n - r))
        } else {
            ((n, self.big_dbar(), n - r - 1), self.big_c(n), (n - r, self.big_d(), n - 1))
        }
    }

    pub fn recursion(&self, n: i64, u: &dyn Fn(i64) -> AlgebraElement) -> BilinearIdentity {
        let ((a, m, b), c, (x, mm, y)) = self.recursion_shape(n);
        BilinearIdentity {
            lhs: (u(a), m, u(b)),
            lhs_extra: AlgebraElement::zero(),
            rhs: (u(x), mm, u(y)),
            rhs_extra: AlgebraElement::from_word(c),
        }
    }

    /// Closed-form candidate for the conserved quantity, assembled from generators only.
    pub fn h_candidate(&self) -> AlgebraElement {
        let r = self.r as i64;
        let n = r + 1;
        let g = |k: CylKind, i: i64| self.generator(cyl(k, i));
        let d = g(CylKind::D, 0);
        let dbar = g(CylKind::Dbar, 0);
        let mut terms = Vec::new();
        let mut w = d.inv();
        w.append(&g(CylKind::X, n));
        w.append_inv(&g(CylKind::X, n - r));
        terms.push(w);
        let mut w = dbar.inv();
        w.append(&g(CylKind::X, n - r));
        w.append_inv(&g(CylKind::X, n));
        terms.push(w);
        for m in n + 1 - r..=n {
            let mut w = g(CylKind::Xbar, m - 1).inv();
            w.append(&g(CylKind::C, m));
            w.append_inv(&g(CylKind::X, m));
            terms.push(w);
        }
        let mut out = AlgebraElement::zero();
        for w in terms {
            out.add_term(w, BigInt::one());
        }
        out
    }

    /// `D̄ U_{n-r} + D U_{n+r} = H U_n` for even `n`, `U_{n-r} D + U_{n+r} D̄ = U_n H` for odd `n`.
    pub fn conservation_holds(&self, n: i64, h: &AlgebraElement, u: &dyn Fn(i64) -> AlgebraElement) -> bool {
        let r = self.r as i64;
        if n % 2 == 0 {
            let lhs = &u(n - r).left_mul_word(&self.big_dbar()) + &u(n + r).left_mul_word(&self.big_d());
            lhs == h.mul(&u(n))
        } else {
            let lhs = &u(n - r).right_mul_word(&self.big_d()) + &u(n + r).right_mul_word(&self.big_dbar());
            lhs == u(n).mul(h)
        }
    }

    /// Generators of the subgroup spanned by `D, D̄, C_1..C_r, U_1..U_{r+1}`.
    pub fn distinguished_generators(&self) -> Vec<Word> {
        let r = self.r as i64;
        let mut out = vec![self.big_d(), self.big_dbar()];
        out.extend((1..=r).map(|i| self.big_c(i)));
        for n in 1..=r + 1 {
            out.push(self.u(n).as_word().expect("single generator").clone());
        }
        out
    }
}

pub fn cylinder_expand(r: u32, n: i64) -> Result<AlgebraElement, SurfaceError> {
    Ok(CylinderModel::new(r)?.u(n))
}

/// `A m B + e = A' m' B' + e'` with `A, B, A', B'` sums and `m, m'` words.
#[derive(Clone, Debug)]
pub struct BilinearIdentity {
    pub lhs: (AlgebraElement, Word, AlgebraElement),
    pub lhs_extra: AlgebraElement,
    pub rhs: (AlgebraElement, Word, AlgebraElement),
    pub rhs_extra: AlgebraElement,
}

impl BilinearIdentity {
    /// Number of word products on the larger side.
    pub fn product_count(&self) -> usize {
        (self.lhs.0.len() * self.lhs.2.len()).max(self.rhs.0.len() * self.rhs.2.len())
    }

    /// Exact comparison in the group algebra.
    pub fn holds(&self) -> bool {
        let mut alphabet = std::collections::BTreeSet::new();
        for e in [&self.lhs.0, &self.lhs.2, &self.rhs.0, &self.rhs.2, &self.lhs_extra, &self.rhs_extra] {
            for w in e.words() {
                alphabet.extend(w.symbols());
            }
        }
        alphabet.extend(self.lhs.1.symbols());
        alphabet.extend(self.rhs.1.symbols());
        let packer = Packer::new(alphabet);
        let side = |(a, m, b): &(AlgebraElement, Word, AlgebraElement), extra: &AlgebraElement| {
            let bs: Vec<(Vec<u16>, i64)> = b.terms().map(|(w, c)| (packer.pack(w), coeff_i64(c))).collect();
            let m = packer.pack(m);
            let heads: Vec<(Vec<u16>, i64)> = a
                .terms()
                .map(|(w, c)| {
                    let mut h = packer.pack(w);
                    append_reduced(&mut h, &m);
                    (h, coeff_i64(c))
                })
                .collect();
            let mut terms: Vec<(Box<[u16]>, i64)> = heads
                .par_iter()
                .flat_map_iter(|(h, ca)| {
                    bs.iter().map(move |(w, cb)| {
                        let mut out = h.clone();
                        append_reduced(&mut out, w);
                        (out.into_boxed_slice(), ca * cb)
                    })
                })
                .collect();
            terms.extend(extra.terms().map(|(w, c)| (packer.pack(w).into_boxed_slice(), coeff_i64(c))));
            terms.par_sort_unstable();
            let mut merged: Vec<(Box<[u16]>, i64)> = Vec::with_capacity(terms.len());
            for (w, c) in terms {
                match merged.last_mut() {
                    Some((lw, lc)) if *lw == w => *lc += c,
                    _ => merged.push((w, c)),
                }
            }
            merged.retain(|(_, c)| *c != 0);
            merged
        };
        side(&self.lhs, &self.lhs_extra) == side(&self.rhs, &self.rhs_extra)
    }

    /// Exact evaluation of both sides at one matrix assignment.
    pub fn holds_at(&self, a: &MatrixAssignment) -> Result<bool, OracleError> {
        let side = |(x, m, y): &(AlgebraElement, Word, AlgebraElement), extra: &AlgebraElement| -> Result<Mat, OracleError> {
            Ok(a.eval(x)?.mul(&a.eval_word(m)?).mul(&a.eval(y)?).add(&a.eval(extra)?))
        };
        Ok(side(&self.lhs, &self.lhs_extra)? == side(&self.rhs, &self.rhs_extra)?)
    }
}

fn coeff_i64(c: &BigInt) -> i64 {
    i64::try_from(c).expect("coefficient fits in 64 bits")
}

// letters as 2*index + (inverse), so a letter and its inverse differ in the low bit
struct Packer {
    index: HashMap<Symbol, u16>,
}

impl Packer {
    fn new(alphabet: impl IntoIterator<Item = Symbol>) -> Packer {
        Packer { index: alphabet.into_iter().enumerate().map(|(k, s)| (s, k as u16)).collect() }
    }

    fn pack(&self, w: &Word) -> Vec<u16> {
        w.letters().iter().map(|l| 2 * self.index[&l.sym] + (l.exp < 0) as u16).collect()
    }
}

fn append_reduced(out: &mut Vec<u16>, w: &[u16]) {
    for &c in w {
        if out.last() == Some(&(c ^ 1)) {
            out.pop();
        } else {
            out.push(c);
        }
    }
}

/// How each recursion instance was decided.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckRoute {
    Symbolic,
    Oracle,
}

#[derive(Clone, Debug)]
pub struct CylinderOptions {
    pub n_min: i64,
    pub n_max: i64,
    /// Largest product count decided symbolically; larger instances go to the matrix oracle.
    pub symbolic_budget: usize,
    pub oracle_dims: Vec<usize>,
    pub oracle_trials: usize,
    pub seed: u64,
    pub membership: bool,
}

impl CylinderOptions {
    pub fn new(n_min: i64, n_max: i64) -> CylinderOptions {
        CylinderOptions {
            n_min,
            n_max,
            symbolic_budget: 1_000_000,
            oracle_dims: vec![2],
            oracle_trials: 2,
            seed: 0,
            membership: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CylinderReport {
    pub r: u32,
    pub n_min: i64,
    pub n_max: i64,
    pub rank: usize,
    pub term_counts: BTreeMap<i64, usize>,
    pub positive: bool,
    pub recursion_routes: BTreeMap<i64, CheckRoute>,
    pub recursion_failures: Vec<i64>,
    pub conservation_failures: Vec<i64>,
    pub membership_checked: bool,
    pub membership_failures: Vec<i64>,
    pub h_terms: usize,
}

impl CylinderReport {
    pub fn passed(&self) -> bool {
        self.positive && self.recursion_failures.is_empty() && self.conservation_failures.is_empty()
    }
}

/// Computes `U_n` for `n` in `[n_min, n_max + r]` and checks positivity, the
/// recursion on `[n_min + r + 1, n_max]` and conservation on `[n_min + r, n_max]`.
pub fn cylinder_run(r: u32, opts: &CylinderOptions) -> Result<(AlgebraElement, CylinderReport), SurfaceError> {
    let model = CylinderModel::new(r)?;
    let ri = r as i64;
    let (n_min, n_max) = (opts.n_min, opts.n_max);
    let range: Vec<i64> = (n_min..=n_max + ri).collect();
    let us: BTreeMap<i64, AlgebraElement> = range.par_iter().map(|&n| (n, model.u(n))).collect();
    let u = |n: i64| us[&n].clone();
    let h = model.h_candidate();

    let mut recursion_routes = BTreeMap::new();
    let mut recursion_failures = Vec::new();
    let mut deferred = Vec::new();
    for n in n_min + ri + 1..=n_max {
        let id = model.recursion(n, &u);
        if id.product_count() <= opts.symbolic_budget {
            recursion_routes.insert(n, CheckRoute::Symbolic);
            if !id.holds() {
                recursion_failures.push(n);
            }
        } else {
            recursion_routes.insert(n, CheckRoute::Oracle);
            deferred.push((n, id));
        }
    }
    if !deferred.is_empty() {
        let basis = model.rewriter().basis().to_vec();
        let needed: std::collections::BTreeSet<i64> =
            deferred.iter().flat_map(|(n, _)| [*n, n - 1, n - ri, n - ri - 1]).collect();
        let mut failed = std::collections::BTreeSet::new();
        // one assignment per (dim, trial) is shared by every deferred instance
        verify_with("cylinder recursion", &opts.oracle_dims, opts.oracle_trials, opts.seed, |k, s| {
            let a = FpAssignment::new(&random_assignment(&basis, k, s)).ok_or(OracleError::SingularAtAssignment(s))?;
            let evals: Result<BTreeMap<i64, FpMat>, OracleError> =
                needed.par_iter().map(|&n| Ok((n, a.eval(&us[&n])?))).collect();
            let evals = evals?;
            for (n, _) in &deferred {
                let ((p, m, q), c, (x, mm, y)) = model.recursion_shape(*n);
                let lhs = evals[&p].mul(&a.eval_word(&m)?).mul(&evals[&q]);
                let rhs = a.eval_word(&c)?.add(&evals[&x].mul(&a.eval_word(&mm)?).mul(&evals[&y]));
                if lhs != rhs {
                    failed.insert(*n);
                }
            }
            Ok(true)
        });
        recursion_failures.extend(failed);
    }

    let conservation_failures: Vec<i64> =
        (n_min + ri..=n_max).into_par_iter().filter(|&n| !model.conservation_holds(n, &h, &u)).collect();
    let membership_failures = if opts.membership {
        let gens = model.distinguished_generators();
        (n_min..=n_max)
            .filter(|n| !us[n].words().all(|w| stallings_membership(&gens, w).is_some()))
            .collect()
    } else {
        Vec::new()
    };
    let report = CylinderReport {
        r,
        n_min,
        n_max,
        rank: model.rank(),
        term_counts: us.iter().filter(|(n, _)| **n <= n_max).map(|(n, e)| (*n, e.len())).collect(),
        positive: us.values().all(|e| e.all_coefficients_one()),
        recursion_routes,
        recursion_failures,
        conservation_failures,
        membership_checked: opts.membership,
        membership_failures,
        h_terms: h.len(),
    };
    Ok((h, report))
}

/// Checks conservation for all `n` in `[1, n_max]` and returns the candidate.
pub fn cylinder_conserved(r: u32, n_max: i64) -> Result<(AlgebraElement, CylinderReport), SurfaceError> {
    let (h, report) = cylinder_run(r, &CylinderOptions::new(1 - r as i64, n_max))?;
    if let Some(&n) = report.conservation_failures.first() {
        return Err(SurfaceError::ConservationViolated(n));
    }
    Ok((h, report))
}

// ---------------------------------------------------------------- strip

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Side {
    Minus,
    Plus,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct StripVertex(Side, i32);

fn strip_letter(a: StripVertex, b: StripVertex) -> Letter {
    use Side::*;
    let s = |k: StripKind, i: i32, j: i32| Symbol::Strip(k, i, j);
    match (a, b) {
        (StripVertex(Minus, i), StripVertex(Plus, j)) => Letter::new(s(StripKind::U, i, j), 1),
        (StripVertex(Plus, i), StripVertex(Minus, j)) => Letter::new(s(StripKind::V, i, j), 1),
        (StripVertex(Plus, i), StripVertex(Plus, j)) if i == j + 1 => Letter::new(s(StripKind::A, j, 0), -1),
        (StripVertex(Plus, i), StripVertex(Plus, j)) if j == i + 1 => Letter::new(s(StripKind::Abar, i, 0), -1),
        (StripVertex(Minus, i), StripVertex(Minus, j)) if i == j + 1 => Letter::new(s(StripKind::B, j, 0), -1),
        (StripVertex(Minus, i), StripVertex(Minus, j)) if j == i + 1 => Letter::new(s(StripKind::Bbar, i, 0), -1),
        _ => panic!("{a:?} and {b:?} are not adjacent on the strip"),
    }
}

fn strip_polygon(a: i32, b: i32) -> (Vec<StripVertex>, Triangulation) {
    let mut verts: Vec<StripVertex> = (a..=b).map(|i| StripVertex(Side::Minus, i)).collect();
    verts.extend((a..=b).rev().map(|i| StripVertex(Side::Plus, i)));
    let size = verts.len() as u32;
    let label: HashMap<StripVertex, u32> = verts.iter().enumerate().map(|(k, &v)| (v, k as u32 + 1)).collect();
    let mut diagonals = Vec::new();
    for i in a..=b {
        for (p, q) in [(StripVertex(Side::Minus, i), StripVertex(Side::Plus, i)), (StripVertex(Side::Minus, i), StripVertex(Side::Plus, i + 1))] {
            if let (Some(&x), Some(&y)) = (label.get(&p), label.get(&q)) {
                let c = Chord::new(x, y);
                if !c.is_boundary(size) {
                    diagonals.push(c);
                }
            }
        }
    }
    (verts, Triangulation::new(size, diagonals).expect("zigzag triangulation of the strip window"))
}

/// Infinite strip with marked points `i-` on the lower and `i+` on the upper
/// boundary, restricted to the columns `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct StripModel {
    lo: i32,
    hi: i32,
    rw: Rewriter,
}

impl StripModel {
    pub fn new(lo: i32, hi: i32) -> Result<StripModel, SurfaceError> {
        assert!(lo < hi, "the window needs at least two columns");
        let mut gens = std::collections::BTreeSet::new();
        let mut relators = Vec::new();
        let mut unknowns = Vec::new();
        for i in lo..hi {
            let tris = [
                [StripVertex(Side::Minus, i), StripVertex(Side::Plus, i), StripVertex(Side::Plus, i + 1)],
                [StripVertex(Side::Minus, i), StripVertex(Side::Minus, i + 1), StripVertex(Side::Plus, i + 1)],
            ];
            for t in tris {
                let rel = relator_letters([0, 1, 2], |a, b| strip_letter(t[a as usize], t[b as usize]));
                gens.extend(rel.iter().map(|l| l.sym));
                relators.push(rel);
            }
            unknowns.push(Symbol::Strip(StripKind::V, i + 1, i));
            unknowns.push(Symbol::Strip(StripKind::B, i, 0));
        }
        let gens: Vec<Symbol> = gens.into_iter().collect();
        let rw = solve_relators(&gens, &unknowns, &relators)?;
        Ok(StripModel { lo, hi, rw })
    }

    pub fn window(&self) -> (i32, i32) {
        (self.lo, self.hi)
    }

    pub fn rewriter(&self) -> &Rewriter {
        &self.rw
    }

    pub fn rank(&self) -> usize {
        self.rw.rank()
    }

    pub fn generator(&self, s: Symbol) -> Word {
        self.rw.rule(s).unwrap_or_else(|| panic!("{s} is not a generator of the window")).clone()
    }

    pub fn a(&self, j: i32) -> Word {
        self.generator(Symbol::Strip(StripKind::A, j, 0))
    }

    pub fn abar(&self, j: i32) -> Word {
        self.generator(Symbol::Strip(StripKind::Abar, j, 0))
    }

    pub fn b(&self, j: i32) -> Word {
        self.generator(Symbol::Strip(StripKind::B, j, 0))
    }

    pub fn bbar(&self, j: i32) -> Word {
        self.generator(Symbol::Strip(StripKind::Bbar, j, 0))
    }

    /// `U_ij` (from `i-` to `j+`) or `V_ij` (from `i+` to `j-`).
    pub fn expand(&self, kind: StripKind, i: i32, j: i32) -> Result<AlgebraElement, SurfaceError> {
        let (a, b) = (i.min(j) - 1, i.max(j) + 1);
        if a < self.lo || b > self.hi {
            return Err(SurfaceError::WindowTooSmall { lo: self.lo, hi: self.hi, need_lo: a, need_hi: b });
        }
        let (verts, tri) = strip_polygon(a, b);
        let pos = |v: StripVertex| verts.iter().position(|&w| w == v).unwrap() as u32 + 1;
        let (p, q) = match kind {
            StripKind::U => (pos(StripVertex(Side::Minus, i)), pos(StripVertex(Side::Plus, j))),
            StripKind::V => (pos(StripVertex(Side::Plus, i)), pos(StripVertex(Side::Minus, j))),
            other => panic!("{other:?} is a boundary family"),
        };
        Ok(expand_with(&tri, p, q, |x, y| {
            let l = strip_letter(verts[x as usize - 1], verts[y as usize - 1]);
            self.rw.rewrite_word(&word_of(l))
        }))
    }

    pub fn u(&self, i: i32, j: i32) -> Result<AlgebraElement, SurfaceError> {
        self.expand(StripKind::U, i, j)
    }

    pub fn v(&self, i: i32, j: i32) -> Result<AlgebraElement, SurfaceError> {
        self.expand(StripKind::V, i, j)
    }
}

pub fn strip_expand(kind: StripKind, i: i32, j: i32) -> Result<AlgebraElement, SurfaceError> {
    StripModel::new(i.min(j) - 1, i.max(j) + 1)?.expand(kind, i, j)
}

/// The four exchange-type relations of the strip at `(i, j)`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StripRelations {
    pub i: i32,
    pub j: i32,
    pub u_exchange: bool,
    pub v_exchange: bool,
    pub u_balance: bool,
    pub v_balance: bool,
}

impl StripRelations {
    pub fn all(&self) -> bool {
        self.u_exchange && self.v_exchange && self.u_balance && self.v_balance
    }
}

pub fn strip_relations(m: &StripModel, i: i32, j: i32) -> Result<StripRelations, SurfaceError> {
    let one = |w: Word| AlgebraElement::from_word(w);
    // U_{i+1,j} A_j V_{j+1,i} = B_i^-1 + U_{i+1,j+1} Abar_j V_{ji}
    let lhs = m.u(i + 1, j)?.right_mul_word(&m.a(j)).mul(&m.v(j + 1, i)?);
    let rhs = &one(m.b(i).inv()) + &m.u(i + 1, j + 1)?.right_mul_word(&m.abar(j)).mul(&m.v(j, i)?);
    let u_exchange = lhs == rhs;
    let lhs = m.v(i + 1, j)?.right_mul_word(&m.b(j)).mul(&m.u(j + 1, i)?);
    let rhs = &one(m.a(i).inv()) + &m.v(i + 1, j + 1)?.right_mul_word(&m.bbar(j)).mul(&m.u(j, i)?);
    let v_exchange = lhs == rhs;
    // U_ij A_j V_{j+1,i} = U_{i,j+1} Abar_j V_{ji}
    let lhs = m.u(i, j)?.right_mul_word(&m.a(j)).mul(&m.v(j + 1, i)?);
    let rhs = m.u(i, j + 1)?.right_mul_word(&m.abar(j)).mul(&m.v(j, i)?);
    let u_balance = lhs == rhs;
    let lhs = m.v(i, j)?.right_mul_word(&m.b(j)).mul(&m.u(j + 1, i)?);
    let rhs = m.v(i, j + 1)?.right_mul_word(&m.bbar(j)).mul(&m.u(j, i)?);
    let v_balance = lhs == rhs;
    Ok(StripRelations { i, j, u_exchange, v_exchange, u_balance, v_balance })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum StripSign {
    Plus,
    Minus,
}

/// `H^+ = U_ii^-1 (U_{i,i-1} A_{i-1} + U_{i,i+1} Abar_i)`, or the `V`/`B` twin for `Minus`.
pub fn strip_h(m: &StripModel, i: i32, sign: StripSign) -> Result<AlgebraElement, SurfaceError> {
    let (diag, left, right) = match sign {
        StripSign::Plus => (m.u(i, i)?, m.u(i, i - 1)?.right_mul_word(&m.a(i - 1)), m.u(i, i + 1)?.right_mul_word(&m.abar(i))),
        StripSign::Minus => (m.v(i, i)?, m.v(i, i - 1)?.right_mul_word(&m.b(i - 1)), m.v(i, i + 1)?.right_mul_word(&m.bbar(i))),
    };
    let d = diag.as_word().expect("vertical edge is a single generator").inv();
    Ok((&left + &right).left_mul_word(&d))
}

/// Checks `U_{j,i-1} A_{i-1} + U_{j,i+1} Abar_i = U_ji H^+` (or the twin) for every `j` in range.
pub fn strip_conserved(m: &StripModel, i: i32, js: impl IntoIterator<Item = i32>, sign: StripSign) -> Result<Vec<i32>, SurfaceError> {
    let h = strip_h(m, i, sign)?;
    let mut failures = Vec::new();
    for j in js {
        let (lhs, base) = match sign {
            StripSign::Plus => (
                &m.u(j, i - 1)?.right_mul_word(&m.a(i - 1)) + &m.u(j, i + 1)?.right_mul_word(&m.abar(i)),
                m.u(j, i)?,
            ),
            StripSign::Minus => (
                &m.v(j, i - 1)?.right_mul_word(&m.b(i - 1)) + &m.v(j, i + 1)?.right_mul_word(&m.bbar(i)),
                m.v(j, i)?,
            ),
        };
        if lhs != base.mul(&h) {
            failures.push(j);
        }
    }
    Ok(failures)
}

// ---------------------------------------------------------------- punctured polygon

/// Symbol on `P_n(1)` for the oriented edge `(i,j)` of the double cover `P_2n`.
pub fn pn1_symbol(n: u32, i: u32, j: u32) -> Symbol {
    let pi = |v: u32| if v <= n { v } else { v - n };
    let (a, b) = (pi(i), pi(j));
    if a == b {
        return Symbol::Punct(PunctKind::Loop, a, 0);
    }
    let d = (j + 2 * n - i) % (2 * n);
    let kind = if d < n { PunctKind::Plus } else { PunctKind::Minus };
    Symbol::Punct(kind, a, b)
}

/// Relabels every `t(i,j)` of a `2n`-gon element to the `P_n(1)` symbols.
pub fn pn1_project(n: u32, p: &AlgebraElement) -> AlgebraElement {
    p.map_words(|w| {
        reduce(w.letters().iter().map(|l| match l.sym {
            Symbol::Edge(i, j) => Letter::new(pn1_symbol(n, i, j), l.exp),
            other => panic!("{other} is not a polygon edge"),
        }))
    })
}

/// Lift of the triangulation of `P_3(1)` containing the loop at 1 and `x-(1,2)`.
pub fn pn1_example_lift() -> Triangulation {
    Triangulation::new(6, [Chord::new(1, 4), Chord::new(1, 5), Chord::new(2, 4)]).expect("valid lift")
}

/// Projected expansion of the lifted curve from `p` to `q` in the double cover.
pub fn pn1_expand(n: u32, lift: &Triangulation, p: u32, q: u32) -> AlgebraElement {
    assert_eq!(lift.n(), 2 * n);
    let mut out = AlgebraElement::zero();
    AdmissibleSearch::new(lift, p, q).for_each(|seq| {
        let letters = crate::laurent::monomial_letters(seq).into_iter().map(|l| match l.sym {
            Symbol::Edge(i, j) => Letter::new(pn1_symbol(n, i, j), l.exp),
            _ => unreachable!(),
        });
        out.add_term(reduce(letters), BigInt::one());
    });
    out
}

// ---------------------------------------------------------------- rank

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct SurfaceInvariants {
    pub euler_characteristic: i64,
    pub marked: u32,
    pub boundary_marked: u32,
    pub special: u32,
    pub closed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum GroupType {
    Free(u64),
    OneRelator(u64),
    Trivial,
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupType::Free(r) => write!(f, "Free({r})"),
            GroupType::OneRelator(g) => write!(f, "OneRelator({g})"),
            GroupType::Trivial => write!(f, "Trivial"),
        }
    }
}

pub fn triangle_group_type(inv: &SurfaceInvariants) -> Result<GroupType, SurfaceError> {
    let SurfaceInvariants { euler_characteristic: chi, marked, boundary_marked: ib, special: h, closed } = *inv;
    let illegal = |m: &str| Err(SurfaceError::IllegalSurface(m.to_string()));
    if marked == 0 {
        return illegal("at least one marked point is required");
    }
    if ib > marked {
        return illegal("more boundary marked points than marked points");
    }
    if closed && ib > 0 {
        return illegal("a closed surface has no boundary marked points");
    }
    if !closed && ib == 0 {
        return illegal("each boundary component needs a marked point");
    }
    if closed && chi > 2 {
        return illegal("closed surfaces have Euler characteristic at most 2");
    }
    if !closed && chi > 1 {
        return illegal("surfaces with boundary have Euler characteristic at most 1");
    }
    let (i, ib, h) = (marked as i64, ib as i64, h as i64);
    let count = |v: i64| -> Result<u64, SurfaceError> {
        u64::try_from(v).map_err(|_| SurfaceError::IllegalSurface(format!("negative generator count {v}")))
    };
    if !closed || h > 0 {
        let disk_small = !closed && chi == 1 && i + ib == 2;
        return Ok(GroupType::Free(count(if disk_small && h == 0 {
            i + 1
        } else if disk_small {
            2 * h + 3 * i - 4
        } else {
            2 * h + 4 * (i - chi) - ib
        })?));
    }
    Ok(match (chi, i) {
        (2, 1) => GroupType::Trivial,
        (2, 2 | 3) => GroupType::Free(count(3 * i - 4)?),
        (1, 1) => GroupType::Free(2),
        _ => GroupType::OneRelator(count(4 * (i - chi) + 1)?),
    })
}

/// Euler characteristic of a named closed surface.
pub fn closed_surface_chi(name: &str) -> Option<i64> {
    match name {
        "sphere" => Some(2),
        "projective-plane" => Some(1),
        "torus" | "klein-bottle" => Some(0),
        _ => {
            let (kind, g) = name.split_once(':')?;
            let g: i64 = g.parse().ok()?;
            match kind {
                "orientable" if g >= 0 => Some(2 - 2 * g),
                "nonorientable" if g >= 1 => Some(2 - g),
                _ => None,
            }
        }
    }
}
