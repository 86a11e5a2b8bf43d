//! Generic-matrix evaluation for identities that need inverses of sums.
//!
//! Generators are sent to random invertible integer matrices and both sides
//! of an identity are evaluated in exact rational arithmetic. A mismatch
//! disproves the identity; agreement over several sizes and seeds is strong
//! evidence for it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::wordcore::{AlgebraElement, Letter, Symbol, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("singular matrix at assignment (seed {0})")]
    SingularAtAssignment(u64),
    #[error("symbol {0} has no assigned matrix")]
    Unassigned(String),
}

/// Square matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    k: usize,
    e: Vec<BigRational>,
}

impl Mat {
    pub fn zero(k: usize) -> Mat {
        Mat { k, e: vec![BigRational::zero(); k * k] }
    }

    pub fn identity(k: usize) -> Mat {
        let mut m = Mat::zero(k);
        for i in 0..k {
            m.e[i * k + i] = BigRational::one();
        }
        m
    }

    pub fn scalar(k: usize, c: BigRational) -> Mat {
        let mut m = Mat::zero(k);
        for i in 0..k {
            m.e[i * k + i] = c.clone();
        }
        m
    }

    pub fn from_ints(k: usize, entries: &[i64]) -> Mat {
        assert_eq!(entries.len(), k * k);
        Mat { k, e: entries.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect() }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.e[r * self.k + c]
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat { k: self.k, e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        Mat { k: self.k, e: self.e.iter().zip(&o.e).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Mat {
        Mat { k: self.k, e: self.e.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Mat {
        Mat { k: self.k, e: self.e.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let k = self.k;
        let mut out = Mat::zero(k);
        for i in 0..k {
            for l in 0..k {
                let a = &self.e[i * k + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..k {
                    out.e[i * k + j] += a * &o.e[l * k + j];
                }
            }
        }
        out
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inv(&self) -> Option<Mat> {
        let k = self.k;
        let mut a = self.e.clone();
        let mut b = Mat::identity(k).e;
        for col in 0..k {
            let piv = (col..k).find(|&r| !a[r * k + col].is_zero())?;
            if piv != col {
                for c in 0..k {
                    a.swap(piv * k + c, col * k + c);
                    b.swap(piv * k + c, col * k + c);
                }
            }
            let p = a[col * k + col].clone();
            for c in 0..k {
                a[col * k + c] = &a[col * k + c] / &p;
                b[col * k + c] = &b[col * k + c] / &p;
            }
            for r in 0..k {
                if r == col || a[r * k + col].is_zero() {
                    continue;
                }
                let f = a[r * k + col].clone();
                for c in 0..k {
                    let (ac, bc) = (a[col * k + c].clone(), b[col * k + c].clone());
                    a[r * k + c] -= &f * ac;
                    b[r * k + c] -= &f * bc;
                }
            }
        }
        Some(Mat { k, e: b })
    }

    pub fn det(&self) -> BigRational {
        let k = self.k;
        let mut a = self.e.clone();
        let mut det = BigRational::one();
        for col in 0..k {
            let Some(piv) = (col..k).find(|&r| !a[r * k + col].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                for c in 0..k {
                    a.swap(piv * k + c, col * k + c);
                }
                det = -det;
            }
            let p = a[col * k + col].clone();
            det *= &p;
            for r in col + 1..k {
                if a[r * k + col].is_zero() {
                    continue;
                }
                let f = &a[r * k + col] / &p;
                for c in col..k {
                    let v = a[col * k + c].clone();
                    a[r * k + c] -= &f * v;
                }
            }
        }
        det
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.k {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.k {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

/// Invertible matrices for a set of generators.
#[derive(Clone, Debug)]
pub struct MatrixAssignment {
    k: usize,
    seed: u64,
    mats: BTreeMap<Symbol, (Mat, Mat)>,
}

fn random_invertible(k: usize, rng: &mut ChaCha8Rng) -> (Mat, Mat) {
    loop {
        let entries: Vec<i64> = (0..k * k).map(|_| rng.gen_range(-9..=9)).collect();
        let m = Mat::from_ints(k, &entries);
        if let Some(inv) = m.inv() {
            return (m, inv);
        }
    }
}

impl MatrixAssignment {
    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn empty(k: usize, seed: u64) -> MatrixAssignment {
        MatrixAssignment { k, seed, mats: BTreeMap::new() }
    }

    /// Assigns a matrix; `None` if it is singular.
    pub fn insert(&mut self, s: Symbol, m: Mat) -> Option<()> {
        let inv = m.inv()?;
        self.mats.insert(s, (m, inv));
        Some(())
    }

    pub fn get(&self, s: Symbol) -> Option<&Mat> {
        self.mats.get(&s).map(|p| &p.0)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.mats.keys().copied()
    }

    fn letter(&self, s: Symbol, exp: i8) -> Result<&Mat, OracleError> {
        let (m, inv) = self.mats.get(&s).ok_or_else(|| OracleError::Unassigned(s.to_string()))?;
        Ok(if exp == 1 { m } else { inv })
    }

    pub fn eval_word(&self, w: &Word) -> Result<Mat, OracleError> {
        let mut acc = Mat::identity(self.k);
        for l in w.letters() {
            acc = acc.mul(self.letter(l.sym, l.exp)?);
        }
        Ok(acc)
    }

    pub fn eval(&self, p: &AlgebraElement) -> Result<Mat, OracleError> {
        // lexicographic order lets consecutive words share prefix products
        let mut words: Vec<(&[Letter], &BigInt)> = p.terms().map(|(w, c)| (w.letters(), c)).collect();
        words.sort_unstable();
        if words.len() < 2048 {
            return self.eval_sorted(&words);
        }
        let parts: Result<Vec<Mat>, OracleError> = words.par_chunks(1024).map(|c| self.eval_sorted(c)).collect();
        Ok(parts?.iter().fold(Mat::zero(self.k), |acc, m| acc.add(m)))
    }

    fn eval_sorted(&self, words: &[(&[Letter], &BigInt)]) -> Result<Mat, OracleError> {
        let mut acc = Mat::zero(self.k);
        let mut stack: Vec<Mat> = vec![Mat::identity(self.k)];
        let mut prev: &[Letter] = &[];
        for &(w, c) in words {
            let common = prev.iter().zip(w).take_while(|(a, b)| a == b).count();
            stack.truncate(common + 1);
            for l in &w[common..] {
                let next = stack.last().unwrap().mul(self.letter(l.sym, l.exp)?);
                stack.push(next);
            }
            let m = stack.last().unwrap();
            acc = if c.is_one() { acc.add(m) } else { acc.add(&m.scale(&BigRational::from_integer(c.clone()))) };
            prev = w;
        }
        Ok(acc)
    }
}

/// Prime modulus `2^61 - 1` used by [`FpMat`].
pub const MODULUS: u64 = (1 << 61) - 1;

fn fp_mul(a: u64, b: u64) -> u64 {
    let x = a as u128 * b as u128;
    let r = (x as u64 & MODULUS) + (x >> 61) as u64;
    if r >= MODULUS {
        r - MODULUS
    } else {
        r
    }
}

fn fp_add(a: u64, b: u64) -> u64 {
    let r = a + b;
    if r >= MODULUS {
        r - MODULUS
    } else {
        r
    }
}

fn fp_pow(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mul(acc, b);
        }
        b = fp_mul(b, b);
        e >>= 1;
    }
    acc
}

fn fp_from_int(x: &BigInt) -> u64 {
    let m = BigInt::from(MODULUS);
    let r = ((x % &m) + &m) % &m;
    u64::try_from(r).expect("reduced residue")
}

/// Square matrix over the prime field of size [`MODULUS`]. Large sums are
/// evaluated here: reduction mod `p` is a ring homomorphism, so identities
/// that hold over the integers hold here as well.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FpMat {
    k: usize,
    e: Vec<u64>,
}

impl FpMat {
    pub fn zero(k: usize) -> FpMat {
        FpMat { k, e: vec![0; k * k] }
    }

    pub fn identity(k: usize) -> FpMat {
        let mut m = FpMat::zero(k);
        for i in 0..k {
            m.e[i * k + i] = 1;
        }
        m
    }

    /// Reduction of a rational matrix; `None` if a denominator vanishes mod `p`.
    pub fn from_mat(m: &Mat) -> Option<FpMat> {
        let e = m
            .e
            .iter()
            .map(|x| {
                let d = fp_from_int(x.denom());
                (d != 0).then(|| fp_mul(fp_from_int(x.numer()), fp_pow(d, MODULUS - 2)))
            })
            .collect::<Option<Vec<u64>>>()?;
        Some(FpMat { k: m.k, e })
    }

    pub fn add(&self, o: &FpMat) -> FpMat {
        FpMat { k: self.k, e: self.e.iter().zip(&o.e).map(|(&a, &b)| fp_add(a, b)).collect() }
    }

    pub fn scale(&self, c: u64) -> FpMat {
        FpMat { k: self.k, e: self.e.iter().map(|&a| fp_mul(a, c)).collect() }
    }

    pub fn mul(&self, o: &FpMat) -> FpMat {
        let k = self.k;
        let mut out = FpMat::zero(k);
        for i in 0..k {
            for l in 0..k {
                let a = self.e[i * k + l];
                for j in 0..k {
                    out.e[i * k + j] = fp_add(out.e[i * k + j], fp_mul(a, o.e[l * k + j]));
                }
            }
        }
        out
    }
}

/// Reduction mod `p` of a [`MatrixAssignment`].
#[derive(Clone, Debug)]
pub struct FpAssignment {
    k: usize,
    mats: HashMap<Symbol, (FpMat, FpMat)>,
}

impl FpAssignment {
    pub fn new(a: &MatrixAssignment) -> Option<FpAssignment> {
        let mats = a
            .mats
            .iter()
            .map(|(s, (m, inv))| Some((*s, (FpMat::from_mat(m)?, FpMat::from_mat(inv)?))))
            .collect::<Option<HashMap<_, _>>>()?;
        Some(FpAssignment { k: a.k, mats })
    }

    fn letter(&self, s: Symbol, exp: i8) -> Result<&FpMat, OracleError> {
        let (m, inv) = self.mats.get(&s).ok_or_else(|| OracleError::Unassigned(s.to_string()))?;
        Ok(if exp == 1 { m } else { inv })
    }

    pub fn eval_word(&self, w: &Word) -> Result<FpMat, OracleError> {
        let mut acc = FpMat::identity(self.k);
        for l in w.letters() {
            acc = acc.mul(self.letter(l.sym, l.exp)?);
        }
        Ok(acc)
    }

    pub fn eval(&self, p: &AlgebraElement) -> Result<FpMat, OracleError> {
        let mut words: Vec<(&[Letter], &BigInt)> = p.terms().map(|(w, c)| (w.letters(), c)).collect();
        words.sort_unstable();
        let mut acc = FpMat::zero(self.k);
        let mut stack = vec![FpMat::identity(self.k)];
        let mut prev: &[Letter] = &[];
        for (w, c) in words {
            let common = prev.iter().zip(w).take_while(|(a, b)| a == b).count();
            stack.truncate(common + 1);
            for l in &w[common..] {
                let next = stack.last().unwrap().mul(self.letter(l.sym, l.exp)?);
                stack.push(next);
            }
            let m = stack.last().unwrap();
            acc = if c.is_one() { acc.add(m) } else { acc.add(&m.scale(fp_from_int(c))) };
            prev = w;
        }
        Ok(acc)
    }
}

/// Entries uniform in `[-9, 9]`, singular draws redrawn. Symbols are drawn in sorted order.
pub fn random_assignment(symbols: &[Symbol], k: usize, seed: u64) -> MatrixAssignment {
    assert!(k >= 1);
    let sorted: BTreeSet<Symbol> = symbols.iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mats = sorted.into_iter().map(|s| (s, random_invertible(k, &mut rng))).collect();
    MatrixAssignment { k, seed, mats }
}

/// Rational expression with explicit inversion, for evaluation only.
#[derive(Clone, Debug)]
pub enum Expr {
    Elem(AlgebraElement),
    Int(i64),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Inv(Box<Expr>),
}

impl Expr {
    pub fn sym(s: Symbol) -> Expr {
        Expr::Elem(AlgebraElement::gen(s))
    }

    pub fn word(w: Word) -> Expr {
        Expr::Elem(AlgebraElement::from_word(w))
    }

    pub fn inv(self) -> Expr {
        Expr::Inv(Box::new(self))
    }

    pub fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }

    pub fn sub(self, other: Expr) -> Expr {
        Expr::Add(vec![self, other.neg()])
    }

    pub fn symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Elem(a) => {
                for w in a.words() {
                    out.extend(w.symbols());
                }
            }
            Expr::Int(_) => {}
            Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|e| e.symbols(out)),
            Expr::Neg(e) | Expr::Inv(e) => e.symbols(out),
        }
    }
}

impl From<AlgebraElement> for Expr {
    fn from(a: AlgebraElement) -> Expr {
        Expr::Elem(a)
    }
}

pub fn eval(e: &Expr, a: &MatrixAssignment) -> Result<Mat, OracleError> {
    let k = a.dim();
    Ok(match e {
        Expr::Elem(p) => a.eval(p)?,
        Expr::Int(c) => Mat::scalar(k, BigRational::from_integer(BigInt::from(*c))),
        Expr::Add(v) => {
            let mut acc = Mat::zero(k);
            for x in v {
                acc = acc.add(&eval(x, a)?);
            }
            acc
        }
        Expr::Mul(v) => {
            let mut acc = Mat::identity(k);
            for x in v {
                acc = acc.mul(&eval(x, a)?);
            }
            acc
        }
        Expr::Neg(x) => eval(x, a)?.neg(),
        Expr::Inv(x) => eval(x, a)?.inv().ok_or(OracleError::SingularAtAssignment(a.seed()))?,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub identity: String,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub result: Verdict,
    pub witness_seed: Option<u64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.result == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Seed used for trial `t` at size `k`.
pub fn trial_seed(base: u64, k: usize, t: usize, attempt: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((k as u64) << 40)
        .wrapping_add((t as u64) << 20)
        .wrapping_add(attempt as u64)
}

/// Compares two sides under a caller-supplied family of assignments.
///
/// `check` gets an assignment and returns `Ok(true)` on agreement; singular
/// evaluations are retried with a fresh seed.
pub fn verify_with<F>(name: &str, dims: &[usize], trials: usize, seed: u64, mut check: F) -> Report
where
    F: FnMut(usize, u64) -> Result<bool, OracleError>,
{
    for &k in dims {
        for t in 0..trials {
            let mut attempt = 0;
            loop {
                let s = trial_seed(seed, k, t, attempt);
                match check(k, s) {
                    Ok(true) => break,
                    Ok(false) => {
                        return Report {
                            identity: name.to_string(),
                            dims: dims.to_vec(),
                            trials,
                            result: Verdict::Fail,
                            witness_seed: Some(s),
                        }
                    }
                    Err(OracleError::SingularAtAssignment(_)) if attempt < 20 => attempt += 1,
                    Err(_) => {
                        return Report {
                            identity: name.to_string(),
                            dims: dims.to_vec(),
                            trials,
                            result: Verdict::Fail,
                            witness_seed: Some(s),
                        }
                    }
                }
            }
        }
    }
    Report { identity: name.to_string(), dims: dims.to_vec(), trials, result: Verdict::Pass, witness_seed: None }
}

/// Exact matrix comparison of `lhs` and `rhs` over random assignments to their symbols.
pub fn verify_identity(name: &str, lhs: &Expr, rhs: &Expr, dims: &[usize], trials: usize, seed: u64) -> Report {
    let mut syms = BTreeSet::new();
    lhs.symbols(&mut syms);
    rhs.symbols(&mut syms);
    let syms: Vec<Symbol> = syms.into_iter().collect();
    verify_with(name, dims, trials, seed, |k, s| {
        let a = random_assignment(&syms, k, s);
        Ok(eval(lhs, &a)? == eval(rhs, &a)?)
    })
}

/// Scalar matrices for the two rows of a `2 x n` block matrix.
#[derive(Clone, Debug)]
pub struct TwoRowMatrix {
    pub row1: Vec<Mat>,
    pub row2: Vec<Mat>,
}

impl TwoRowMatrix {
    /// Random invertible blocks; column `i` is stored at index `i-1`.
    pub fn random(n: usize, k: usize, seed: u64) -> TwoRowMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let row1 = (0..n).map(|_| random_invertible(k, &mut rng).0).collect();
        let row2 = (0..n).map(|_| random_invertible(k, &mut rng).0).collect();
        TwoRowMatrix { row1, row2 }
    }

    fn a1(&self, i: u32) -> &Mat {
        &self.row1[i as usize - 1]
    }

    fn a2(&self, i: u32) -> &Mat {
        &self.row2[i as usize - 1]
    }

    fn sgn(a: u32, b: u32) -> BigRational {
        if a > b {
            BigRational::one()
        } else {
            -BigRational::one()
        }
    }

    /// Quasiminor with the row-1 entry of column `j` boxed.
    pub fn minor_top(&self, i: u32, j: u32, seed: u64) -> Result<Mat, OracleError> {
        let inv = self.a2(i).inv().ok_or(OracleError::SingularAtAssignment(seed))?;
        let m = self.a1(j).sub(&self.a1(i).mul(&inv).mul(self.a2(j)));
        Ok(m.scale(&Self::sgn(i, j)))
    }

    /// Quasiminor with the row-2 entry of column `j` boxed.
    pub fn minor_bottom(&self, i: u32, j: u32, seed: u64) -> Result<Mat, OracleError> {
        let inv = self.a1(i).inv().ok_or(OracleError::SingularAtAssignment(seed))?;
        let m = self.a2(j).sub(&self.a2(i).mul(&inv).mul(self.a1(j)));
        Ok(m.scale(&Self::sgn(j, i)))
    }
}

/// Both boxed-row forms of the quasi-Plücker coordinate `Q_ij^k`.
pub fn quasi_plucker_pair(a: &TwoRowMatrix, i: u32, j: u32, k: u32, seed: u64) -> Result<(Mat, Mat), OracleError> {
    let top = a
        .minor_top(k, i, seed)?
        .inv()
        .ok_or(OracleError::SingularAtAssignment(seed))?
        .mul(&a.minor_top(k, j, seed)?);
    let bottom = a
        .minor_bottom(k, i, seed)?
        .inv()
        .ok_or(OracleError::SingularAtAssignment(seed))?
        .mul(&a.minor_bottom(k, j, seed)?);
    Ok((top, bottom))
}

/// `Q_ij^k` by the row-1 formula, after checking it against the row-2 formula.
pub fn quasi_plucker(a: &TwoRowMatrix, i: u32, j: u32, k: u32, seed: u64) -> Result<Mat, OracleError> {
    let (top, bottom) = quasi_plucker_pair(a, i, j, k, seed)?;
    assert_eq!(top, bottom, "boxed-row formulas disagree for Q_{i}{j}^{k}");
    Ok(top)
}

/// Assignment of edge symbols `t(i,j)` to quasiminors of a two-row matrix.
pub fn quasiminor_assignment(a: &TwoRowMatrix, n: u32, top: bool, seed: u64) -> Result<MatrixAssignment, OracleError> {
    let k = a.row1[0].dim();
    let mut out = MatrixAssignment::empty(k, seed);
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                let m = if top { a.minor_top(i, j, seed)? } else { a.minor_bottom(i, j, seed)? };
                out.insert(Symbol::Edge(i, j), m).ok_or(OracleError::SingularAtAssignment(seed))?;
            }
        }
    }
    Ok(out)
}

/// Matrices for every symbol of `images`' keys, obtained by evaluating the
/// image elements under `base`.
pub fn pull_back(base: &MatrixAssignment, images: &HashMap<Symbol, AlgebraElement>) -> Result<MatrixAssignment, OracleError> {
    let mut out = MatrixAssignment::empty(base.dim(), base.seed());
    for (&s, img) in images {
        let m = base.eval(img)?;
        out.insert(s, m).ok_or(OracleError::SingularAtAssignment(base.seed()))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(name: &str) -> Symbol {
        Symbol::named(name).unwrap()
    }

    #[test]
    fn inverse_and_det() {
        let m = Mat::from_ints(2, &[1, 2, 3, 4]);
        assert_eq!(m.mul(&m.inv().unwrap()), Mat::identity(2));
        assert_eq!(m.det(), BigRational::from_integer((-2).into()));
        assert!(Mat::from_ints(2, &[1, 2, 2, 4]).inv().is_none());
    }

    #[test]
    fn assignments_are_reproducible_and_invertible() {
        let syms = [s("a"), s("b"), s("c")];
        let a1 = random_assignment(&syms, 3, 7);
        let a2 = random_assignment(&syms, 3, 7);
        for x in syms {
            assert_eq!(a1.get(x), a2.get(x));
            assert!(!a1.get(x).unwrap().det().is_zero());
        }
        let k1 = random_assignment(&syms, 1, 3);
        for x in syms {
            assert!(!k1.get(x).unwrap().get(0, 0).is_zero());
        }
    }

    #[test]
    fn eval_basics() {
        let syms = [s("a"), s("b")];
        let a = random_assignment(&syms, 2, 1);
        assert_eq!(a.eval(&AlgebraElement::one()).unwrap(), Mat::identity(2));
        let w = crate::wordcore::reduce([
            crate::wordcore::Letter::new(s("a"), 1),
            crate::wordcore::Letter::new(s("b"), -1),
        ]);
        let e = Expr::Mul(vec![Expr::word(w.clone()), Expr::word(w.inv())]);
        assert_eq!(eval(&e, &a).unwrap(), Mat::identity(2));
    }

    #[test]
    fn verify_detects_non_identity() {
        let lhs = Expr::Mul(vec![Expr::sym(s("a")), Expr::sym(s("b"))]);
        let rhs = Expr::Mul(vec![Expr::sym(s("b")), Expr::sym(s("a"))]);
        assert!(!verify_identity("ab=ba", &lhs, &rhs, &[2], 3, 1).passed());
        assert!(verify_identity("ab=ba over k=1", &lhs, &rhs, &[1], 3, 1).passed());
        assert!(verify_identity("ab=ab", &lhs, &lhs.clone(), &[2, 3], 5, 1).passed());
    }

    #[test]
    fn report_json_shape() {
        let r = verify_identity("x", &Expr::Int(1), &Expr::Int(1), &[2, 3], 5, 0);
        assert_eq!(r.to_json(), r#"{"identity":"x","dims":[2,3],"trials":5,"result":"PASS","witness_seed":null}"#);
    }

    #[test]
    fn quasi_plucker_one_by_one() {
        // k = 1: Q_ij^k = (a1j a2k - a1k a2j) / (a1i a2k - a1k a2i) up to the sign pattern
        let a = TwoRowMatrix::random(4, 1, 11);
        let q = quasi_plucker(&a, 1, 2, 3, 11).unwrap();
        let v = |m: &Mat| m.get(0, 0).clone();
        let det = |x: u32, y: u32| v(&a.row1[x as usize - 1]) * v(&a.row2[y as usize - 1]) - v(&a.row1[y as usize - 1]) * v(&a.row2[x as usize - 1]);
        assert_eq!(v(&q), det(3, 2) / det(3, 1));
    }
}
