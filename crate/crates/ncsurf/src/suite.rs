//! The verification battery: fourteen independent checks covering expansions,
//! relations, mutation, conserved quantities, ranks and the matrix model.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::laurent::{abelianize, expand_x, expand_x_raw, expand_y, ptolemy_eval};
use crate::mutation::{flip_hom, MutationError};
use crate::oracle::{
    eval, quasi_plucker_pair, quasiminor_assignment, random_assignment, verify_with, Expr, MatrixAssignment,
    OracleError, Report, TwoRowMatrix,
};
use crate::polygon::{Chord, Triangulation};
use crate::presentation::{big_triangle_relations, retraction_tau, rewriter, total_angle, triangle_relator, Rewriter};
use crate::surfaces::{
    cylinder_conserved, pn1_example_lift, pn1_expand, strip_conserved, strip_relations, triangle_group_type,
    CylinderModel, GroupType, StripModel, StripSign, SurfaceInvariants,
};
use crate::wordcore::{reduce, stallings_membership, AlgebraElement, Letter, Symbol, Word};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Largest polygon enumerated exhaustively (criteria 4 to 6).
    pub n_max: u32,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { n_max: 7, seed: 0 }
    }
}

pub const CRITERIA: [(u32, &str); 14] = [
    (1, "pentagon expansion"),
    (2, "hexagon expansion"),
    (3, "sector expansions"),
    (4, "relation suite"),
    (5, "flip compatibility"),
    (6, "commutative specialization"),
    (7, "total angle invariance"),
    (8, "annulus recursion and conservation"),
    (9, "strip relations"),
    (10, "once-punctured triangle"),
    (11, "retraction"),
    (12, "rank table"),
    (13, "quasi-Plucker model"),
    (14, "word and algebra properties"),
];

pub fn run_criterion(id: u32, opts: &SuiteOptions) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or_else(|| panic!("no criterion {id}"));
    let start = Instant::now();
    let (passed, detail) = match id {
        1 => pentagon(),
        2 => hexagon(),
        3 => sectors(),
        4 => relation_suite(opts),
        5 => flip_compatibility(opts),
        6 => commutative(opts),
        7 => total_angles(opts),
        8 => annulus(),
        9 => strip(),
        10 => punctured_triangle(),
        11 => retraction(),
        12 => rank_table(),
        13 => quasi_plucker_model(opts),
        _ => properties(opts),
    };
    CriterionResult { id, name, passed, detail, elapsed_ms: start.elapsed().as_millis() }
}

pub fn run_all(opts: &SuiteOptions) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, opts)).collect()
}

fn tri(s: &str) -> Triangulation {
    s.parse().expect("valid triangulation")
}

fn word(s: &str) -> Word {
    s.parse().expect("valid word")
}

/// Sum of the given raw edge words, rewritten to the basis.
fn formula(rw: &Rewriter, terms: &[&str]) -> AlgebraElement {
    AlgebraElement::from_words(terms.iter().map(|t| rw.rewrite_word(&word(t))))
}

fn expansion_matches(t: &str, p: u32, q: u32, terms: &[&str]) -> (bool, String) {
    let t = tri(t);
    let rw = rewriter(&t);
    let raw = expand_x_raw(&t, p, q);
    let raw_want = AlgebraElement::from_words(terms.iter().map(|s| word(s)));
    let got = expand_x(&t, p, q, &rw);
    let ok = raw == raw_want && got == formula(&rw, terms) && got.len() == terms.len();
    (ok, format!("{} terms: {raw}", got.len()))
}

fn pentagon() -> (bool, String) {
    expansion_matches(
        "n=5;diag=1-3,1-4",
        2,
        5,
        &[
            "t(2,1).t(4,1)^-1.t(4,5)",
            "t(2,3).t(1,3)^-1.t(1,5)",
            "t(2,1).t(3,1)^-1.t(3,4).t(1,4)^-1.t(1,5)",
        ],
    )
}

fn hexagon() -> (bool, String) {
    expansion_matches(
        "n=6;diag=1-3,3-6,4-6",
        2,
        5,
        &[
            "t(2,3).t(6,3)^-1.t(6,5)",
            "t(2,1).t(3,1)^-1.t(3,6).t(4,6)^-1.t(4,5)",
            "t(2,1).t(3,1)^-1.t(3,4).t(6,4)^-1.t(6,5)",
            "t(2,3).t(1,3)^-1.t(1,6).t(4,6)^-1.t(4,5)",
            "t(2,3).t(1,3)^-1.t(1,6).t(3,6)^-1.t(3,4).t(6,4)^-1.t(6,5)",
        ],
    )
}

/// Product of sectors `y_ij^k = x_ki^-1 x_kj`, each given as `(i, j, k)`.
fn sectors_word(rw: &Rewriter, ys: &[(u32, u32, u32)]) -> Word {
    let mut w = Word::empty();
    for &(i, j, k) in ys {
        w.append_inv(rw.edge(k, i));
        w.append(rw.edge(k, j));
    }
    w
}

fn sectors() -> (bool, String) {
    let cases: [(&str, Vec<Vec<(u32, u32, u32)>>); 2] = [
        ("n=5;diag=1-3,1-4", vec![vec![(1, 5, 4)], vec![(1, 3, 2), (3, 5, 1)], vec![(1, 4, 3), (4, 5, 1)]]),
        (
            "n=6;diag=1-3,3-6,4-6",
            vec![
                vec![(1, 6, 3), (6, 5, 4)],
                vec![(1, 3, 2), (3, 5, 6)],
                vec![(1, 4, 3), (4, 5, 6)],
                vec![(1, 3, 2), (3, 6, 1), (6, 5, 4)],
                vec![(1, 3, 2), (3, 6, 1), (6, 4, 3), (4, 5, 6)],
            ],
        ),
    ];
    let mut ok = true;
    let mut sizes = Vec::new();
    for (t, terms) in cases {
        let t = tri(t);
        let rw = rewriter(&t);
        let want = AlgebraElement::from_words(terms.iter().map(|ys| sectors_word(&rw, ys)));
        // y_15^2 = x_21^-1 x_25
        let via_x = expand_x(&t, 2, 5, &rw).left_mul_word(&rw.edge(2, 1).inv());
        match expand_y(&t, 2, 5, 1, &rw) {
            Ok(got) => {
                ok &= got == want && got == via_x && got.len() == terms.len();
                sizes.push(got.len());
            }
            Err(_) => ok = false,
        }
    }
    (ok, format!("term counts {sizes:?}"))
}

fn triangulations_for_relations(opts: &SuiteOptions) -> Vec<Triangulation> {
    let mut all: Vec<Triangulation> = (3..=opts.n_max).flat_map(Triangulation::all).collect();
    for n in opts.n_max.max(7) + 1..=10 {
        for s in 0..50 {
            all.push(Triangulation::random(n, opts.seed.wrapping_add(1000 * n as u64 + s)));
        }
    }
    all
}

fn all_expansions(t: &Triangulation, rw: &Rewriter) -> HashMap<(u32, u32), AlgebraElement> {
    let n = t.n();
    let pairs: Vec<(u32, u32)> = (1..=n).flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    pairs.into_iter().map(|(i, j)| ((i, j), expand_x(t, i, j, rw))).collect()
}

fn cyclic(q: [u32; 4], n: u32) -> bool {
    let d = |a: u32, b: u32| (b + n - a) % n;
    d(q[0], q[1]) < d(q[0], q[2]) && d(q[0], q[2]) < d(q[0], q[3])
}

/// Counts of (face relators, three-term triangle identities, exchange identities) and failures.
fn relations_on(t: &Triangulation) -> ([usize; 3], usize) {
    let rw = rewriter(t);
    let n = t.n();
    let x = all_expansions(t, &rw);
    let unit = |i: u32, j: u32| rw.edge(i, j).clone();
    let mut counts = [0; 3];
    let mut failures = 0;
    for (a, b, c) in t.triangles() {
        for (i, j, k) in [(a, b, c), (b, c, a), (c, a, b), (a, c, b), (c, b, a), (b, a, c)] {
            let w = reduce(triangle_relator(i, j, k).iter().map(|&((p, q), e)| Letter::new(Symbol::Edge(p, q), e)));
            counts[0] += 1;
            if !rw.rewrite_word(&w).is_empty() {
                failures += 1;
            }
        }
    }
    // x_ij x_kj^-1 x_ki = x_ik x_jk^-1 x_ji for an edge {j,k} and any third vertex i
    for (j, k) in t.oriented_edges() {
        for i in (1..=n).filter(|&i| i != j && i != k) {
            let lhs = x[&(i, j)].right_mul_word(&unit(k, j).inv()).mul(&x[&(k, i)]);
            let rhs = x[&(i, k)].right_mul_word(&unit(j, k).inv()).mul(&x[&(j, i)]);
            counts[1] += 1;
            if lhs != rhs {
                failures += 1;
            }
        }
    }
    for &d in t.diagonals() {
        let (i0, k0) = (d.a, d.b);
        for (i, k) in [(i0, k0), (k0, i0)] {
            for j in 1..=n {
                for l in 1..=n {
                    if [i, k].contains(&j) || [i, k, j].contains(&l) || !cyclic([i, j, k, l], n) {
                        continue;
                    }
                    let lhs = &x[&(j, l)];
                    let rhs = &x[&(j, k)].right_mul_word(&unit(i, k).inv()).mul(&x[&(i, l)])
                        + &x[&(j, i)].right_mul_word(&unit(k, i).inv()).mul(&x[&(k, l)]);
                    counts[2] += 1;
                    if *lhs != rhs {
                        failures += 1;
                    }
                }
            }
        }
    }
    (counts, failures)
}

fn relation_suite(opts: &SuiteOptions) -> (bool, String) {
    let tris = triangulations_for_relations(opts);
    let results: Vec<([usize; 3], usize)> = tris.par_iter().map(relations_on).collect();
    let mut counts = [0; 3];
    let mut failures = 0;
    for (c, f) in results {
        for k in 0..3 {
            counts[k] += c[k];
        }
        failures += f;
    }
    (
        failures == 0,
        format!(
            "{} triangulations; {} face relators, {} triangle identities, {} exchange identities; {failures} failures",
            tris.len(),
            counts[0],
            counts[1],
            counts[2]
        ),
    )
}

#[derive(Clone, Copy, Debug, Default, Serialize, PartialEq, Eq)]
pub struct FlipCheck {
    /// Ordered pairs whose image was computed symbolically.
    pub symbolic: usize,
    /// Pairs needing an inverse of a non-unit image, decided by matrix evaluation.
    pub oracle: usize,
    pub failures: usize,
}

/// Compares the image of every source expansion under the flip homomorphism
/// with the corresponding expansion in the flipped triangulation.
pub fn flip_check(source: &Triangulation, d: Chord, seed: u64) -> Result<FlipCheck, MutationError> {
    let h = flip_hom(source, d)?;
    let n = source.n();
    let mut out = FlipCheck::default();
    let mut deferred = Vec::new();
    for p in 1..=n {
        for q in (1..=n).filter(|&q| q != p) {
            let raw = expand_x_raw(source, p, q);
            let want = expand_x(&h.target, p, q, &h.target_rw);
            match h.apply(&raw) {
                Ok(img) => {
                    out.symbolic += 1;
                    if img != want {
                        out.failures += 1;
                    }
                }
                Err(_) => deferred.push((raw, want)),
            }
        }
    }
    out.oracle = deferred.len();
    if !deferred.is_empty() {
        let basis = h.target_rw.basis().to_vec();
        let mut bad = 0;
        verify_with("flip compatibility", &[2], 2, seed, |k, s| {
            let target = random_assignment(&basis, k, s);
            let source_mats = h.pull_back(&target)?;
            let mut values = Vec::with_capacity(deferred.len());
            for (raw, want) in &deferred {
                values.push(source_mats.eval(raw)? == target.eval(want)?);
            }
            bad = bad.max(values.iter().filter(|v| !**v).count());
            Ok(true)
        });
        out.failures += bad;
    }
    Ok(out)
}

fn flip_compatibility(opts: &SuiteOptions) -> (bool, String) {
    let jobs: Vec<(Triangulation, Chord)> = (4..=opts.n_max)
        .flat_map(Triangulation::all)
        .flat_map(|t| t.diagonals().to_vec().into_iter().map(move |d| (t.clone(), d)))
        .collect();
    let results: Vec<FlipCheck> = jobs
        .par_iter()
        .enumerate()
        .map(|(x, (t, d))| flip_check(t, *d, opts.seed.wrapping_add(x as u64)).expect("diagonal of the source"))
        .collect();
    let (s, o, f) = results.iter().fold((0, 0, 0), |a, r| (a.0 + r.symbolic, a.1 + r.oracle, a.2 + r.failures));
    (
        f == 0,
        format!("{} flips; {s} pairs decided symbolically, {o} by matrix evaluation; {f} failures", jobs.len()),
    )
}

fn random_positive(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(1..=30)), BigInt::from(rng.gen_range(1..=30)))
}

fn commutative_on(t: &Triangulation, seed: u64) -> usize {
    let n = t.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expansions: Vec<((u32, u32), AlgebraElement)> = (1..=n)
        .flat_map(|p| (1..=n).filter(move |&q| q != p).map(move |q| (p, q)))
        .map(|(p, q)| ((p, q), expand_x_raw(t, p, q)))
        .collect();
    let mut failures = 0;
    for _ in 0..20 {
        let mut values = BTreeMap::new();
        for c in t.boundary().into_iter().chain(t.diagonals().iter().copied()) {
            values.insert(c, random_positive(&mut rng));
        }
        for ((p, q), e) in &expansions {
            let ab = abelianize(e, |s| match s {
                Symbol::Edge(a, b) => values[&Chord::new(a, b)].clone(),
                other => panic!("unexpected symbol {other}"),
            });
            if ab != ptolemy_eval(t, &values, *p, *q) {
                failures += 1;
            }
        }
    }
    failures
}

fn commutative(opts: &SuiteOptions) -> (bool, String) {
    let tris: Vec<Triangulation> = (3..=opts.n_max).flat_map(Triangulation::all).collect();
    let failures: usize =
        tris.par_iter().enumerate().map(|(x, t)| commutative_on(t, opts.seed.wrapping_add(x as u64))).sum();
    (failures == 0, format!("{} triangulations, 20 assignments each; {failures} failures", tris.len()))
}

/// Matrices for the basis of `rw`, obtained by expanding each basis edge in the reference triangulation.
fn induced_assignment(
    reference: &Triangulation,
    ref_rw: &Rewriter,
    ref_mats: &MatrixAssignment,
    rw: &Rewriter,
) -> Result<MatrixAssignment, OracleError> {
    let mut out = MatrixAssignment::empty(ref_mats.dim(), ref_mats.seed());
    for &s in rw.basis() {
        let Symbol::Edge(a, b) = s else { unreachable!("polygon bases consist of edges") };
        let m = ref_mats.eval(&expand_x(reference, a, b, ref_rw))?;
        out.insert(s, m).ok_or(OracleError::SingularAtAssignment(ref_mats.seed()))?;
    }
    Ok(out)
}

/// Evaluates every total angle of every triangulation of the `n`-gon under one
/// shared assignment per trial and checks that they agree.
pub fn angle_invariance(n: u32, dims: &[usize], trials: usize, seed: u64) -> Report {
    let tris = Triangulation::all(n);
    let reference = &tris[0];
    let ref_rw = rewriter(reference);
    let rws: Vec<Rewriter> = tris.iter().map(rewriter).collect();
    let angles: Vec<Vec<AlgebraElement>> =
        tris.iter().zip(&rws).map(|(t, rw)| (1..=n).map(|i| total_angle(t, rw, i)).collect()).collect();
    verify_with(&format!("total angles, n={n}"), dims, trials, seed, |k, s| {
        let ref_mats = random_assignment(ref_rw.basis(), k, s);
        let mut first: Option<Vec<_>> = None;
        for (x, rw) in rws.iter().enumerate() {
            let mats = induced_assignment(reference, &ref_rw, &ref_mats, rw)?;
            let vals = angles[x].iter().map(|a| mats.eval(a)).collect::<Result<Vec<_>, _>>()?;
            match &first {
                None => first = Some(vals),
                Some(f) if *f != vals => return Ok(false),
                Some(_) => {}
            }
        }
        Ok(true)
    })
}

fn total_angles(opts: &SuiteOptions) -> (bool, String) {
    let reports: Vec<Report> = [5u32, 6].iter().map(|&n| angle_invariance(n, &[2, 3], 5, opts.seed)).collect();
    (reports.iter().all(Report::passed), reports.iter().map(Report::to_json).collect::<Vec<_>>().join(" "))
}

fn annulus() -> (bool, String) {
    match cylinder_conserved(2, 20) {
        Ok((h, report)) => {
            let symbolic = report.recursion_routes.values().filter(|r| matches!(r, crate::surfaces::CheckRoute::Symbolic)).count();
            (
                report.passed() && report.positive,
                format!(
                    "U_n for n in [{}, {}], positive={}, recursion checked at {} indices ({symbolic} symbolic), H has {} terms, term count at 20: {}",
                    report.n_min,
                    report.n_max,
                    report.positive,
                    report.recursion_routes.len(),
                    h.len(),
                    report.term_counts.get(&20).copied().unwrap_or(0)
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn strip() -> (bool, String) {
    let run = || -> Result<(usize, Vec<i32>, Vec<i32>), crate::surfaces::SurfaceError> {
        let m = StripModel::new(-6, 7)?;
        let mut bad = 0;
        for j in -5..=5 {
            if !strip_relations(&m, 0, j)?.all() {
                bad += 1;
            }
        }
        Ok((bad, strip_conserved(&m, 0, -3..=3, StripSign::Plus)?, strip_conserved(&m, 0, -3..=3, StripSign::Minus)?))
    };
    match run() {
        Ok((bad, hp, hm)) => (
            bad == 0 && hp.is_empty() && hm.is_empty(),
            format!("relation failures {bad}/11, H+ failures {hp:?}, H- failures {hm:?}"),
        ),
        Err(e) => (false, e.to_string()),
    }
}

fn punctured_triangle() -> (bool, String) {
    let lift = pn1_example_lift();
    let want = |terms: &[&str]| AlgebraElement::from_words(terms.iter().map(|s| word(s)));
    let cases: [(&str, u32, u32, Vec<&str>); 3] = [
        ("x2", 2, 5, vec!["x+(2,1).loop1^-1.x-(1,2)", "x-(2,1).loop1^-1.x+(1,2)"]),
        (
            "x-(2,3)",
            2,
            6,
            vec![
                "x-(2,1).x+(2,1)^-1.x+(2,3)",
                "x+(2,1).loop1^-1.x-(1,3)",
                "x-(2,1).loop1^-1.x+(1,2).x-(1,2)^-1.x-(1,3)",
            ],
        ),
        (
            "x3",
            3,
            6,
            vec![
                "x+(3,1).loop1^-1.x-(1,3)",
                "x+(3,1).x+(2,1)^-1.x-(2,1).x+(2,1)^-1.x+(2,3)",
                "x-(3,2).x-(1,2)^-1.loop1.x+(2,1)^-1.x+(2,3)",
                "x-(3,2).x-(1,2)^-1.x+(1,2).x-(1,2)^-1.x-(1,3)",
                "x+(3,1).x+(2,1)^-1.x-(2,1).loop1^-1.x+(1,2).x-(1,2)^-1.x-(1,3)",
            ],
        ),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, p, q, terms) in cases {
        let got = pn1_expand(3, &lift, p, q);
        let good = got == want(&terms);
        ok &= good;
        detail.push(format!("{name}: {} terms{}", got.len(), if good { "" } else { " (mismatch)" }));
    }
    (ok, detail.join(", "))
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct RetractionCheck {
    pub n: u32,
    pub relators: usize,
    pub triangulations: usize,
    pub failures: usize,
}

/// Applies the retraction of every triangulation of the `n`-gon to every
/// relator of the big triangle group.
pub fn retraction_check(n: u32) -> RetractionCheck {
    let relators = big_triangle_relations(n);
    let tris = Triangulation::all(n);
    let mut failures = 0;
    for t in &tris {
        let rw = rewriter(t);
        let tau = retraction_tau(t, &rw);
        for r in &relators {
            let img = r.substitute(|s| match s {
                Symbol::Edge(a, b) => tau[&(a, b)].clone(),
                other => panic!("unexpected symbol {other}"),
            });
            if !img.is_empty() {
                failures += 1;
            }
        }
    }
    RetractionCheck { n, relators: relators.len(), triangulations: tris.len(), failures }
}

fn retraction() -> (bool, String) {
    let checks: Vec<RetractionCheck> = (4..=6).map(retraction_check).collect();
    let counts_ok = checks.iter().all(|c| {
        let m = (c.n - 1) as usize;
        c.relators == m * (m - 1) * (m - 2) / 6
    });
    let failures: usize = checks.iter().map(|c| c.failures).sum();
    let images: usize = checks.iter().map(|c| c.relators * c.triangulations).sum();
    (counts_ok && failures == 0, format!("{images} relator images, {failures} nonempty"))
}

/// Expected group types, as `(description, invariants, expected)`.
pub fn rank_cases() -> Vec<(String, SurfaceInvariants, GroupType)> {
    let s = |chi, marked, ib, h, closed| SurfaceInvariants {
        euler_characteristic: chi,
        marked,
        boundary_marked: ib,
        special: h,
        closed,
    };
    let mut out = vec![
        ("sphere, 1 puncture".to_string(), s(2, 1, 0, 0, true), GroupType::Trivial),
        ("sphere, 2 punctures".into(), s(2, 2, 0, 0, true), GroupType::Free(2)),
        ("sphere, 3 punctures".into(), s(2, 3, 0, 0, true), GroupType::Free(5)),
        ("sphere, 4 punctures".into(), s(2, 4, 0, 0, true), GroupType::OneRelator(9)),
        ("projective plane, 1 puncture".into(), s(1, 1, 0, 0, true), GroupType::Free(2)),
        ("torus, 1 puncture".into(), s(0, 1, 0, 0, true), GroupType::OneRelator(5)),
        ("torus, 2 punctures".into(), s(0, 2, 0, 0, true), GroupType::OneRelator(9)),
        ("monogon".into(), s(1, 1, 1, 0, false), GroupType::Free(2)),
        ("digon".into(), s(1, 2, 2, 0, false), GroupType::Free(2)),
        ("monogon, 1 special".into(), s(1, 1, 1, 1, false), GroupType::Free(1)),
        ("monogon, 2 special".into(), s(1, 1, 1, 2, false), GroupType::Free(3)),
        ("once-punctured monogon".into(), s(1, 2, 1, 0, false), GroupType::Free(3)),
    ];
    for n in 3..=8u32 {
        out.push((format!("{n}-gon"), s(1, n, n, 0, false), GroupType::Free(3 * n as u64 - 4)));
    }
    for r in 1..=4u32 {
        out.push((format!("annulus, {r}+1 marked"), s(0, r + 1, r + 1, 0, false), GroupType::Free(3 * r as u64 + 3)));
    }
    out
}

fn rank_table() -> (bool, String) {
    let cases = rank_cases();
    let mut bad: Vec<String> = cases
        .iter()
        .filter(|(_, inv, want)| triangle_group_type(inv).ok() != Some(*want))
        .map(|(d, _, _)| d.clone())
        .collect();
    for n in 3..=8u32 {
        if rewriter(&Triangulation::starlike(n, 1)).rank() != 3 * n as usize - 4 {
            bad.push(format!("{n}-gon basis"));
        }
    }
    for r in 1..=4u32 {
        let rank = CylinderModel::new(r).map(|m| m.rank()).unwrap_or(0);
        if rank != 3 * r as usize + 3 {
            bad.push(format!("annulus basis r={r}"));
        }
    }
    (bad.is_empty(), format!("{} cases; mismatches {bad:?}", cases.len()))
}

fn y(i: u32, j: u32, k: u32) -> Expr {
    Expr::Mul(vec![Expr::sym(Symbol::Edge(k, i)).inv(), Expr::sym(Symbol::Edge(k, j))])
}

/// Identities expected to hold in the quasi-Plucker model on `n` points.
pub fn quasi_plucker_identities(n: u32) -> Vec<(String, Expr, Expr)> {
    let mut out = Vec::new();
    let one = || Expr::Int(1);
    let vs: Vec<u32> = (1..=n).collect();
    for &i in &vs {
        for &j in &vs {
            for &k in &vs {
                if i == j || j == k || i == k {
                    continue;
                }
                out.push((format!("y{i}{j}^{k} y{j}{i}^{k} = 1"), Expr::Mul(vec![y(i, j, k), y(j, i, k)]), one()));
                out.push((
                    format!("y{i}{j}^{k} y{j}{k}^{i} y{k}{i}^{j} = 1"),
                    Expr::Mul(vec![y(i, j, k), y(j, k, i), y(k, i, j)]),
                    one(),
                ));
                for &l in &vs {
                    if [i, j, k].contains(&l) {
                        continue;
                    }
                    out.push((
                        format!("y{i}{j}^{l} y{j}{k}^{l} y{k}{i}^{l} = 1"),
                        Expr::Mul(vec![y(i, j, l), y(j, k, l), y(k, i, l)]),
                        one(),
                    ));
                    if cyclic([i, j, k, l], n) {
                        out.push((
                            format!("y{i}{l}^{j} = y{i}{j}^{k} y{j}{l}^{i} + y{i}{l}^{k}"),
                            y(i, l, j),
                            Expr::Add(vec![Expr::Mul(vec![y(i, j, k), y(j, l, i)]), y(i, l, k)]),
                        ));
                    }
                }
            }
        }
    }
    out
}

fn quasi_plucker_model(opts: &SuiteOptions) -> (bool, String) {
    let n = 5u32;
    let identities = quasi_plucker_identities(n);
    let mut ok = true;
    let mut details = Vec::new();
    let agree = verify_with("boxed-row agreement", &[2, 3, 4], 3, opts.seed, |k, s| {
        let a = TwoRowMatrix::random(n as usize, k, s);
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                for l in (1..=n).filter(|&l| l != i && l != j) {
                    let (top, bottom) = quasi_plucker_pair(&a, i, j, l, s)?;
                    if top != bottom {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    });
    ok &= agree.passed();
    details.push(agree.to_json());
    for top in [true, false] {
        let label = if top { "first-row quasiminors" } else { "second-row quasiminors" };
        let report = verify_with(label, &[2, 3, 4], 3, opts.seed, |k, s| {
            let a = TwoRowMatrix::random(n as usize, k, s);
            let mats = quasiminor_assignment(&a, n, top, s)?;
            for (_, lhs, rhs) in &identities {
                if eval(lhs, &mats)? != eval(rhs, &mats)? {
                    return Ok(false);
                }
            }
            Ok(true)
        });
        ok &= report.passed();
        details.push(report.to_json());
    }
    (ok, format!("{} identities; {}", identities.len(), details.join(" ")))
}

fn random_word(rng: &mut ChaCha8Rng, gens: &[Symbol], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    reduce((0..len).map(|_| Letter::new(gens[rng.gen_range(0..gens.len())], if rng.gen_bool(0.5) { 1 } else { -1 })))
}

fn random_element(rng: &mut ChaCha8Rng, gens: &[Symbol]) -> AlgebraElement {
    let mut a = AlgebraElement::zero();
    for _ in 0..rng.gen_range(0..4) {
        a.add_term(random_word(rng, gens, 4), BigInt::from(rng.gen_range(-3..=3)));
    }
    a
}

fn properties(opts: &SuiteOptions) -> (bool, String) {
    let gens: Vec<Symbol> = ["a", "b", "c"].iter().map(|s| Symbol::named(s).expect("plain name")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5EED);
    let mut failures = Vec::new();
    let instances = 1000;
    for t in 0..instances {
        // reduction
        let len = rng.gen_range(0..12);
        let raw: Vec<Letter> = (0..len)
            .map(|_| Letter::new(gens[rng.gen_range(0..3)], if rng.gen_bool(0.5) { 1 } else { -1 }))
            .collect();
        let w = reduce(raw.iter().copied());
        let reduced = w.letters().windows(2).all(|p| p[0] != p[1].inv());
        if reduce(w.letters().iter().copied()) != w || !reduced || !w.mul(&w.inv()).is_empty() {
            failures.push(format!("reduction #{t}"));
        }
        // ring axioms
        let (a, b, c) = (random_element(&mut rng, &gens), random_element(&mut rng, &gens), random_element(&mut rng, &gens));
        let ring = &(&a * &b) * &c == &a * &(&b * &c)
            && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
            && &(&a + &b) * &c == &(&a * &c) + &(&b * &c)
            && &a + &b == &b + &a
            && &a * &AlgebraElement::one() == a
            && (&a - &a).is_zero()
            && (&a * &AlgebraElement::zero()).is_zero();
        if !ring {
            failures.push(format!("ring #{t}"));
        }
        // folding soundness
        let subgroup: Vec<Word> = (0..rng.gen_range(1..4)).map(|_| random_word(&mut rng, &gens, 4)).collect();
        let mut member = Word::empty();
        for _ in 0..rng.gen_range(0..5) {
            let g = &subgroup[rng.gen_range(0..subgroup.len())];
            if rng.gen_bool(0.5) {
                member.append(g)
            } else {
                member.append_inv(g)
            }
        }
        let sound = match stallings_membership(&subgroup, &member) {
            Some(f) => crate::wordcore::SubgroupGraph::new(&subgroup).evaluate(&f) == member,
            None => false,
        };
        let probe = random_word(&mut rng, &gens, 6);
        let probe_sound = match stallings_membership(&subgroup, &probe) {
            Some(f) => crate::wordcore::SubgroupGraph::new(&subgroup).evaluate(&f) == probe,
            None => true,
        };
        if !sound || !probe_sound {
            failures.push(format!("membership #{t}"));
        }
    }
    failures.truncate(5);
    (failures.is_empty(), format!("{instances} instances; first failures {failures:?}"))
}
