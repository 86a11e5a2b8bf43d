//! Acceptance battery. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails or exceeds its time limit.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ncsurf::laurent::{abelianize, expand_x, expand_x_raw, expand_y, ptolemy_eval};
use ncsurf::mutation::flip_hom;
use ncsurf::oracle::{quasi_plucker_pair, random_assignment, FpAssignment, Mat, TwoRowMatrix};
use ncsurf::polygon::{Chord, Triangulation};
use ncsurf::presentation::{retraction_tau, rewriter, Rewriter};
use ncsurf::surfaces::{
    pn1_example_lift, pn1_expand, triangle_group_type, CylinderModel, GroupType, StripModel, SurfaceInvariants,
};
use ncsurf::wordcore::{reduce, stallings_membership, AlgebraElement, Letter, Symbol, Word};

const SEED: u64 = 20_240_601;

// time limits
const EXPANSION_LIMIT: Duration = Duration::from_secs(1);
const RELATION_LIMIT: Duration = Duration::from_secs(120);
const CYLINDER_LIMIT: Duration = Duration::from_secs(60);

fn tri(s: &str) -> Triangulation {
    s.parse().unwrap()
}

fn word(s: &str) -> Word {
    s.parse().unwrap()
}

fn elem(terms: &[&str]) -> AlgebraElement {
    AlgebraElement::from_words(terms.iter().map(|t| word(t)))
}

fn rewritten(rw: &Rewriter, terms: &[&str]) -> AlgebraElement {
    AlgebraElement::from_words(terms.iter().map(|t| rw.rewrite_word(&word(t))))
}

/// `x_ij^{e}` as a raw letter.
fn t(i: u32, j: u32, e: i8) -> Letter {
    Letter::new(Symbol::Edge(i, j), e)
}

fn ordered_pairs(n: u32) -> Vec<(u32, u32)> {
    (1..=n).flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j))).collect()
}

fn cyclically_ordered(q: [u32; 4], n: u32) -> bool {
    let d = |a: u32, b: u32| (b + n - a) % n;
    d(q[0], q[1]) < d(q[0], q[2]) && d(q[0], q[2]) < d(q[0], q[3])
}

// ------------------------------------------------------------------ 1-3

const PENTAGON: [&str; 3] = [
    "t(2,1).t(4,1)^-1.t(4,5)",
    "t(2,3).t(1,3)^-1.t(1,5)",
    "t(2,1).t(3,1)^-1.t(3,4).t(1,4)^-1.t(1,5)",
];

const HEXAGON: [&str; 5] = [
    "t(2,3).t(6,3)^-1.t(6,5)",
    "t(2,1).t(3,1)^-1.t(3,6).t(4,6)^-1.t(4,5)",
    "t(2,1).t(3,1)^-1.t(3,4).t(6,4)^-1.t(6,5)",
    "t(2,3).t(1,3)^-1.t(1,6).t(4,6)^-1.t(4,5)",
    "t(2,3).t(1,3)^-1.t(1,6).t(3,6)^-1.t(3,4).t(6,4)^-1.t(6,5)",
];

fn timed_expansion(t_str: &str, terms: &[&str]) -> (bool, String) {
    let start = Instant::now();
    let t = tri(t_str);
    let rw = rewriter(&t);
    let raw = expand_x_raw(&t, 2, 5);
    let got = expand_x(&t, 2, 5, &rw);
    let elapsed = start.elapsed();
    let want = rewritten(&rw, terms);
    let termwise = raw == elem(terms);
    let ok = termwise && got == want && got.len() == terms.len() && got.all_coefficients_one() && elapsed < EXPANSION_LIMIT;
    (ok, format!("{} terms, term-by-term {termwise}, {elapsed:?}", got.len()))
}

fn c1() -> (bool, String) {
    timed_expansion("n=5;diag=1-3,1-4", &PENTAGON)
}

fn c2() -> (bool, String) {
    timed_expansion("n=6;diag=1-3,3-6,4-6", &HEXAGON)
}

/// `y_ij^k` written as the raw word `x_ki^-1 x_kj`.
fn y_raw(i: u32, j: u32, k: u32) -> String {
    format!("t({k},{i})^-1.t({k},{j})")
}

fn y_product(ys: &[(u32, u32, u32)]) -> String {
    ys.iter().map(|&(i, j, k)| y_raw(i, j, k)).collect::<Vec<_>>().join(".")
}

fn c3() -> (bool, String) {
    let pentagon = [vec![(1, 5, 4)], vec![(1, 3, 2), (3, 5, 1)], vec![(1, 4, 3), (4, 5, 1)]];
    // third term as printed reads y14^3 y46^5, which does not end at 5; the
    // product of sectors along 1,4,5 is y14^3 y45^6
    let hexagon = [
        vec![(1, 6, 3), (6, 5, 4)],
        vec![(1, 3, 2), (3, 5, 6)],
        vec![(1, 4, 3), (4, 5, 6)],
        vec![(1, 3, 2), (3, 6, 1), (6, 5, 4)],
        vec![(1, 3, 2), (3, 6, 1), (6, 4, 3), (4, 5, 6)],
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (t_str, terms) in [("n=5;diag=1-3,1-4", &pentagon[..]), ("n=6;diag=1-3,3-6,4-6", &hexagon[..])] {
        let t = tri(t_str);
        let rw = rewriter(&t);
        let strings: Vec<String> = terms.iter().map(|ys| y_product(ys)).collect();
        let refs: Vec<&str> = strings.iter().map(String::as_str).collect();
        let want = rewritten(&rw, &refs);
        let got = expand_y(&t, 2, 5, 1, &rw).unwrap();
        ok &= got == want && got.len() == terms.len();
        detail.push(format!("{} terms", got.len()));
    }
    // the literal misprinted term is not part of the expansion
    let t = tri("n=6;diag=1-3,3-6,4-6");
    let rw = rewriter(&t);
    let misprint = rw.rewrite_word(&word(&y_product(&[(1, 4, 3), (4, 6, 5)])));
    ok &= expand_y(&t, 2, 5, 1, &rw).unwrap().coeff(&misprint) == BigInt::from(0);
    (ok, detail.join(", "))
}

// ------------------------------------------------------------------ 4

fn relation_failures(tr: &Triangulation) -> (usize, usize) {
    let rw = rewriter(tr);
    let n = tr.n();
    let x: HashMap<(u32, u32), AlgebraElement> =
        ordered_pairs(n).into_iter().map(|(i, j)| ((i, j), expand_x(tr, i, j, &rw))).collect();
    let e = |i: u32, j: u32| rw.edge(i, j).clone();
    let mut checked = 0;
    let mut failures = 0;
    let mut check = |ok: bool| {
        checked += 1;
        if !ok {
            failures += 1;
        }
    };
    // x_ij x_kj^-1 x_ki = x_ik x_jk^-1 x_ji on every face, in every orientation
    for (a, b, c) in tr.triangles() {
        for (i, j, k) in [(a, b, c), (b, c, a), (c, a, b), (a, c, b), (c, b, a), (b, a, c)] {
            let lhs = rw.rewrite_word(&reduce([t(i, j, 1), t(k, j, -1), t(k, i, 1)]));
            let rhs = rw.rewrite_word(&reduce([t(i, k, 1), t(j, k, -1), t(j, i, 1)]));
            check(lhs == rhs);
        }
    }
    // the same identity with x_ij, x_ki, x_ik, x_ji expanded, whenever {j,k} is an edge
    for (j, k) in tr.oriented_edges() {
        for i in (1..=n).filter(|&i| i != j && i != k) {
            let lhs = x[&(i, j)].right_mul_word(&e(k, j).inv()).mul(&x[&(k, i)]);
            let rhs = x[&(i, k)].right_mul_word(&e(j, k).inv()).mul(&x[&(j, i)]);
            check(lhs == rhs);
        }
    }
    // x_jl = x_jk x_ik^-1 x_il + x_ji x_ki^-1 x_kl for cyclically ordered (i,j,k,l) with {i,k} in the triangulation
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                for l in 1..=n {
                    let q = [i, j, k, l];
                    if q.iter().collect::<BTreeSet<_>>().len() < 4 || !cyclically_ordered(q, n) || !tr.has_edge(i, k) {
                        continue;
                    }
                    let rhs = &x[&(j, k)].right_mul_word(&e(i, k).inv()).mul(&x[&(i, l)])
                        + &x[&(j, i)].right_mul_word(&e(k, i).inv()).mul(&x[&(k, l)]);
                    check(x[&(j, l)] == rhs);
                }
            }
        }
    }
    (checked, failures)
}

fn c4() -> (bool, String) {
    let start = Instant::now();
    let mut tris: Vec<Triangulation> = (3..=7).flat_map(Triangulation::all).collect();
    for n in 8..=10u32 {
        tris.extend((0..50).map(|s| Triangulation::random(n, SEED + 100 * n as u64 + s)));
    }
    let results: Vec<(usize, usize)> = tris.par_iter().map(relation_failures).collect();
    let checked: usize = results.iter().map(|r| r.0).sum();
    let failures: usize = results.iter().map(|r| r.1).sum();
    let elapsed = start.elapsed();
    (
        failures == 0 && elapsed < RELATION_LIMIT,
        format!("{} triangulations, {checked} identities, {failures} failures, {elapsed:?}", tris.len()),
    )
}

// ------------------------------------------------------------------ 5

fn flip_failures(source: &Triangulation, d: Chord, seed: u64) -> (usize, usize, usize) {
    let h = flip_hom(source, d).unwrap();
    let (mut symbolic, mut evaluated, mut failures) = (0, 0, 0);
    // shared random matrices on the target basis, and the induced matrices on source edges
    let mut target_mats = None;
    for attempt in 0..20 {
        let a = random_assignment(h.target_rw.basis(), 2, seed ^ (attempt << 32));
        if let Ok(src) = h.pull_back(&a) {
            target_mats = Some((a, src));
            break;
        }
    }
    let (target, src) = target_mats.expect("a nonsingular pull-back");
    for (p, q) in ordered_pairs(source.n()) {
        let raw = expand_x_raw(source, p, q);
        let want = expand_x(&h.target, p, q, &h.target_rw);
        match h.apply(&raw) {
            Ok(img) => {
                symbolic += 1;
                failures += usize::from(img != want);
            }
            Err(_) => {
                evaluated += 1;
                let ok = matches!((src.eval(&raw), target.eval(&want)), (Ok(a), Ok(b)) if a == b);
                failures += usize::from(!ok);
            }
        }
    }
    (symbolic, evaluated, failures)
}

fn c5() -> (bool, String) {
    let jobs: Vec<(Triangulation, Chord)> = (4..=7)
        .flat_map(Triangulation::all)
        .flat_map(|t| t.diagonals().iter().map(|&d| (t.clone(), d)).collect::<Vec<_>>())
        .collect();
    let res: Vec<(usize, usize, usize)> =
        jobs.par_iter().enumerate().map(|(k, (t, d))| flip_failures(t, *d, SEED + k as u64)).collect();
    let (s, e, f) = res.iter().fold((0, 0, 0), |a, r| (a.0 + r.0, a.1 + r.1, a.2 + r.2));
    (f == 0, format!("{} flips, {s} symbolic, {e} by evaluation, {f} failures", jobs.len()))
}

// ------------------------------------------------------------------ 6

fn c6() -> (bool, String) {
    let tris: Vec<Triangulation> = (3..=7).flat_map(Triangulation::all).collect();
    let failures: usize = tris
        .par_iter()
        .enumerate()
        .map(|(k, t)| {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED + k as u64);
            let pairs = ordered_pairs(t.n());
            let exps: Vec<AlgebraElement> = pairs.iter().map(|&(p, q)| expand_x_raw(t, p, q)).collect();
            let mut bad = 0;
            for _ in 0..20 {
                let values: BTreeMap<Chord, BigRational> = t
                    .boundary()
                    .into_iter()
                    .chain(t.diagonals().iter().copied())
                    .map(|c| (c, BigRational::new(rng.gen_range(1..50).into(), rng.gen_range(1..50).into())))
                    .collect();
                for (&(p, q), e) in pairs.iter().zip(&exps) {
                    let lhs = abelianize(e, |s| match s {
                        Symbol::Edge(a, b) => values[&Chord::new(a, b)].clone(),
                        _ => unreachable!(),
                    });
                    bad += usize::from(lhs != ptolemy_eval(t, &values, p, q));
                }
            }
            bad
        })
        .sum();
    (failures == 0, format!("{} triangulations x 20 assignments, {failures} failures", tris.len()))
}

// ------------------------------------------------------------------ 7

/// `T_i = sum over faces (i,j,k) at i of x_ji^-1 x_jk x_ik^-1`, evaluated from edge matrices.
fn total_angle_matrix(t: &Triangulation, i: u32, edge: &dyn Fn(u32, u32) -> Mat, k: usize) -> Option<Mat> {
    let mut acc = Mat::zero(k);
    for (a, b, c) in t.triangles() {
        let others: Vec<u32> = [a, b, c].into_iter().filter(|&v| v != i).collect();
        if others.len() != 2 {
            continue;
        }
        let (j, kk) = (others[0], others[1]);
        acc = acc.add(&edge(j, i).inv()?.mul(&edge(j, kk)).mul(&edge(i, kk).inv()?));
    }
    Some(acc)
}

fn c7() -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [5u32, 6] {
        let tris = Triangulation::all(n);
        let reference = &tris[0];
        let ref_rw = rewriter(reference);
        let mut checked = 0;
        for k in [2usize, 3] {
            for trial in 0..5u64 {
                let a = random_assignment(ref_rw.basis(), k, SEED + 10 * trial + k as u64);
                // every chord matrix comes from its expansion in the reference triangulation
                let chord: HashMap<(u32, u32), Mat> = ordered_pairs(n)
                    .into_iter()
                    .map(|(p, q)| ((p, q), a.eval(&expand_x(reference, p, q, &ref_rw)).unwrap()))
                    .collect();
                let edge = |p: u32, q: u32| chord[&(p, q)].clone();
                let base: Vec<Option<Mat>> = (1..=n).map(|i| total_angle_matrix(reference, i, &edge, k)).collect();
                ok &= base.iter().all(Option::is_some);
                for other in &tris {
                    for i in 1..=n {
                        checked += 1;
                        ok &= total_angle_matrix(other, i, &edge, k) == base[i as usize - 1];
                    }
                }
            }
        }
        detail.push(format!("n={n}: {} triangulations, {checked} comparisons", tris.len()));
    }
    (ok, detail.join("; "))
}

// ------------------------------------------------------------------ 8

fn c8() -> (bool, String) {
    let start = Instant::now();
    let r = 2i64;
    let m = CylinderModel::new(2).unwrap();
    let range: Vec<i64> = (1 - r..=22).collect();
    let u: BTreeMap<i64, AlgebraElement> = range.par_iter().map(|&n| (n, m.u(n))).collect();
    let positive = u.values().all(|e| e.terms().all(|(_, c)| *c == BigInt::from(1)));

    let g = |s: &str| m.generator(s.parse().unwrap());
    let big_d = g("d").inv();
    let big_dbar = g("dbar").inv();
    let big_c = |n: i64| if n % 2 == 0 { g(&format!("c{}", m.per(n))) } else { g(&format!("cbar{}", m.per(n))) };
    let word_of = |w: &Word| AlgebraElement::from_word(w.clone());

    // even n: U_{n-3} D U_n = C_n + U_{n-1} Dbar U_{n-2}
    // odd n:  U_n Dbar U_{n-3} = C_n + U_{n-2} D U_{n-1}
    let sides = |n: i64| -> ((i64, Word, i64), (i64, Word, i64)) {
        if n % 2 == 0 {
            ((n - 3, big_d.clone(), n), (n - 1, big_dbar.clone(), n - 2))
        } else {
            ((n, big_dbar.clone(), n - 3), (n - 2, big_d.clone(), n - 1))
        }
    };
    let mut recursion_failures = Vec::new();
    for n in r + 1..=10 {
        let ((a, w, b), (c, w2, d)) = sides(n);
        let lhs = u[&a].right_mul_word(&w).mul(&u[&b]);
        let rhs = &word_of(&big_c(n)) + &u[&c].right_mul_word(&w2).mul(&u[&d]);
        if lhs != rhs {
            recursion_failures.push(n);
        }
    }
    // beyond n = 10 the products are too large to expand; compare images over a prime field
    for trial in 0..2u64 {
        let a = FpAssignment::new(&random_assignment(m.rewriter().basis(), 2, SEED + trial)).unwrap();
        let ev: BTreeMap<i64, _> = (8..=20).map(|n| (n, a.eval(&u[&n]).unwrap())).collect();
        for n in 11..=20 {
            let ((p, w, q), (c, w2, d)) = sides(n);
            let lhs = ev[&p].mul(&a.eval_word(&w).unwrap()).mul(&ev[&q]);
            let rhs = a.eval_word(&big_c(n)).unwrap().add(&ev[&c].mul(&a.eval_word(&w2).unwrap()).mul(&ev[&d]));
            if lhs != rhs && !recursion_failures.contains(&n) {
                recursion_failures.push(n);
            }
        }
    }

    let h_terms = ["d^-1.x3.x1^-1", "dbar^-1.x1.x3^-1", "xbar1^-1.c2.x2^-1", "xbar2^-1.c1.x3^-1"];
    let h = h_terms.iter().fold(AlgebraElement::zero(), |acc, s| {
        let w = word(s).substitute(|sym| m.generator(sym));
        &acc + &AlgebraElement::from_word(w)
    });
    // even n: Dbar U_{n-2} + D U_{n+2} = H U_n;  odd n: U_{n-2} D + U_{n+2} Dbar = U_n H
    let conservation_failures: Vec<i64> = (1..=20i64)
        .into_par_iter()
        .filter(|&n| {
            let ok = if n % 2 == 0 {
                &u[&(n - 2)].left_mul_word(&big_dbar) + &u[&(n + 2)].left_mul_word(&big_d) == h.mul(&u[&n])
            } else {
                &u[&(n - 2)].right_mul_word(&big_d) + &u[&(n + 2)].right_mul_word(&big_dbar) == u[&n].mul(&h)
            };
            !ok
        })
        .collect();
    let elapsed = start.elapsed();
    let ok = positive
        && recursion_failures.is_empty()
        && conservation_failures.is_empty()
        && h.len() == 4
        && elapsed < CYLINDER_LIMIT;
    (
        ok,
        format!(
            "positive {positive}, |U_20| = {}, recursion failures {recursion_failures:?}, conservation failures {conservation_failures:?}, {elapsed:?}",
            u[&20].len()
        ),
    )
}

// ------------------------------------------------------------------ 9

fn c9() -> (bool, String) {
    let m = StripModel::new(-8, 9).unwrap();
    let one = |w: Word| AlgebraElement::from_word(w);
    let mut bad = Vec::new();
    let i = 0;
    for j in -5..=5 {
        let u = |a, b| m.u(a, b).unwrap();
        let v = |a, b| m.v(a, b).unwrap();
        let rels = [
            u(i + 1, j).right_mul_word(&m.a(j)).mul(&v(j + 1, i))
                == &one(m.b(i).inv()) + &u(i + 1, j + 1).right_mul_word(&m.abar(j)).mul(&v(j, i)),
            v(i + 1, j).right_mul_word(&m.b(j)).mul(&u(j + 1, i))
                == &one(m.a(i).inv()) + &v(i + 1, j + 1).right_mul_word(&m.bbar(j)).mul(&u(j, i)),
            u(i, j).right_mul_word(&m.a(j)).mul(&v(j + 1, i)) == u(i, j + 1).right_mul_word(&m.abar(j)).mul(&v(j, i)),
            v(i, j).right_mul_word(&m.b(j)).mul(&u(j + 1, i)) == v(i, j + 1).right_mul_word(&m.bbar(j)).mul(&u(j, i)),
        ];
        if rels.iter().any(|ok| !ok) {
            bad.push(j);
        }
    }
    // U_{j,i-1} A_{i-1} + U_{j,i+1} Abar_i = U_ji H+, and the V/B twin, with H independent of j
    let mut h_bad = Vec::new();
    for plus in [true, false] {
        let f = |a, b| if plus { m.u(a, b).unwrap() } else { m.v(a, b).unwrap() };
        let (l, r) = if plus { (m.a(i - 1), m.abar(i)) } else { (m.b(i - 1), m.bbar(i)) };
        let num = |j| &f(j, i - 1).right_mul_word(&l) + &f(j, i + 1).right_mul_word(&r);
        let h = num(i).left_mul_word(&f(i, i).as_word().unwrap().inv());
        for j in i - 3..=i + 3 {
            if num(j) != f(j, i).mul(&h) {
                h_bad.push((plus, j));
            }
        }
    }
    (bad.is_empty() && h_bad.is_empty(), format!("relation failures at j {bad:?}, H failures {h_bad:?}"))
}

// ------------------------------------------------------------------ 10

fn c10() -> (bool, String) {
    let lift = pn1_example_lift();
    let x2 = elem(&["x+(2,1).loop1^-1.x-(1,2)", "x-(2,1).loop1^-1.x+(1,2)"]);
    let x3 = elem(&[
        "x+(3,1).loop1^-1.x-(1,3)",
        "x+(3,1).x+(2,1)^-1.x-(2,1).x+(2,1)^-1.x+(2,3)",
        "x-(3,2).x-(1,2)^-1.loop1.x+(2,1)^-1.x+(2,3)",
        "x-(3,2).x-(1,2)^-1.x+(1,2).x-(1,2)^-1.x-(1,3)",
        "x+(3,1).x+(2,1)^-1.x-(2,1).loop1^-1.x+(1,2).x-(1,2)^-1.x-(1,3)",
    ]);
    let x23 = elem(&[
        "x-(2,1).x+(2,1)^-1.x+(2,3)",
        "x+(2,1).loop1^-1.x-(1,3)",
        "x-(2,1).loop1^-1.x+(1,2).x-(1,2)^-1.x-(1,3)",
    ]);
    let g2 = pn1_expand(3, &lift, 2, 5);
    let g3 = pn1_expand(3, &lift, 3, 6);
    let g23 = pn1_expand(3, &lift, 2, 6);
    (
        g2 == x2 && g3 == x3 && g23 == x23,
        format!("x2 {} terms, x3 {} terms, x-(2,3) {} terms", g2.len(), g3.len(), g23.len()),
    )
}

// ------------------------------------------------------------------ 11

fn c11() -> (bool, String) {
    let mut images = 0;
    let mut failures = 0;
    let mut counts = Vec::new();
    for n in 4..=6u32 {
        // t_i1 t_j1^-1 t_jk t_1k^-1 t_1j t_ij^-1 t_ik = t_ik t_1k^-1 t_1j t_ij^-1 t_i1 t_j1^-1 t_jk
        let mut relators = Vec::new();
        for i in 2..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    let lhs = reduce([t(i, 1, 1), t(j, 1, -1), t(j, k, 1), t(1, k, -1), t(1, j, 1), t(i, j, -1), t(i, k, 1)]);
                    let rhs = reduce([t(i, k, 1), t(1, k, -1), t(1, j, 1), t(i, j, -1), t(i, 1, 1), t(j, 1, -1), t(j, k, 1)]);
                    relators.push(lhs.mul(&rhs.inv()));
                }
            }
        }
        let m = n as usize - 1;
        counts.push((relators.len(), m * (m - 1) * (m - 2) / 6));
        for tr in Triangulation::all(n) {
            let rw = rewriter(&tr);
            let tau = retraction_tau(&tr, &rw);
            for rel in &relators {
                images += 1;
                let img = rel.substitute(|s| match s {
                    Symbol::Edge(a, b) => tau[&(a, b)].clone(),
                    _ => unreachable!(),
                });
                failures += usize::from(!img.is_empty());
            }
        }
    }
    let counts_ok = counts.iter().all(|(a, b)| a == b);
    (counts_ok && failures == 0, format!("relator counts {counts:?}, {images} images, {failures} nonempty"))
}

// ------------------------------------------------------------------ 12

fn c12() -> (bool, String) {
    let closed = |chi, i| SurfaceInvariants { euler_characteristic: chi, marked: i, boundary_marked: 0, special: 0, closed: true };
    let open = |chi, i, ib, h| SurfaceInvariants { euler_characteristic: chi, marked: i, boundary_marked: ib, special: h, closed: false };
    let cases = [
        ("sphere |I|=1", closed(2, 1), GroupType::Trivial),
        ("sphere |I|=2", closed(2, 2), GroupType::Free(2)),
        ("sphere |I|=3", closed(2, 3), GroupType::Free(5)),
        ("projective plane |I|=1", closed(1, 1), GroupType::Free(2)),
        ("torus |I|=1", closed(0, 1), GroupType::OneRelator(5)),
        ("genus 2 |I|=1", closed(-2, 1), GroupType::OneRelator(13)),
        ("monogon", open(1, 1, 1, 0), GroupType::Free(2)),
        ("monogon, one special puncture", open(1, 1, 1, 1), GroupType::Free(1)),
        ("monogon, three special punctures", open(1, 1, 1, 3), GroupType::Free(5)),
        ("once-punctured digon", open(1, 3, 2, 0), GroupType::Free(6)),
    ];
    let polygon: Vec<(u32, SurfaceInvariants)> = (3..=9).map(|n| (n, open(1, n, n, 0))).collect();
    let mut bad = Vec::new();
    for (n, inv) in &polygon {
        let basis = rewriter(&Triangulation::starlike(*n, 1)).rank() as u64;
        if triangle_group_type(inv).ok() != Some(GroupType::Free(basis)) || basis != 3 * *n as u64 - 4 {
            bad.push(format!("{n}-gon"));
        }
    }
    for r in 1..=4u32 {
        let basis = CylinderModel::new(r).unwrap().rank() as u64;
        let inv = open(0, r + 1, r + 1, 0);
        if triangle_group_type(&inv).ok() != Some(GroupType::Free(basis)) || basis != 3 * r as u64 + 3 {
            bad.push(format!("annulus r={r}"));
        }
    }
    for (name, inv, want) in &cases {
        if triangle_group_type(inv).ok() != Some(*want) {
            bad.push(name.to_string());
        }
    }
    (bad.is_empty(), format!("mismatches {bad:?}"))
}

// ------------------------------------------------------------------ 13

fn c13() -> (bool, String) {
    let n = 5u32;
    let mut failures = Vec::new();
    let mut checked = 0;
    for k in [2usize, 3, 4] {
        for trial in 0..3u64 {
            let a = TwoRowMatrix::random(n as usize, k, SEED + 7 * trial + k as u64);
            let mut q = HashMap::new();
            for i in 1..=n {
                for j in 1..=n {
                    for l in 1..=n {
                        if i != j && j != l && i != l {
                            let (top, bottom) = quasi_plucker_pair(&a, i, j, l, 0).unwrap();
                            checked += 1;
                            if top != bottom {
                                failures.push(format!("boxed rows Q{i}{j}^{l}"));
                            }
                            q.insert((i, j, l), top);
                        }
                    }
                }
            }
            let id = Mat::identity(k);
            let y = |i, j, l| q[&(i, j, l)].clone();
            for i in 1..=n {
                for j in 1..=n {
                    for l in 1..=n {
                        if i == j || j == l || i == l {
                            continue;
                        }
                        checked += 1;
                        if y(i, j, l).mul(&y(j, i, l)) != id {
                            failures.push(format!("y{i}{j}^{l} y{j}{i}^{l}"));
                        }
                        for m in (1..=n).filter(|m| ![i, j, l].contains(m)) {
                            // y_ij^m y_jl^m y_li^m = 1
                            checked += 1;
                            if y(i, j, m).mul(&y(j, l, m)).mul(&y(l, i, m)) != id {
                                failures.push(format!("y{i}{j}^{m} y{j}{l}^{m} y{l}{i}^{m}"));
                            }
                            // y_im^j = y_ij^l y_jm^i + y_im^l for cyclically ordered (i,j,l,m)
                            if cyclically_ordered([i, j, l, m], n) {
                                checked += 1;
                                if y(i, m, j) != y(i, j, l).mul(&y(j, m, i)).add(&y(i, m, l)) {
                                    failures.push(format!("exchange ({i},{j},{l},{m})"));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    failures.truncate(5);
    (failures.is_empty(), format!("{checked} evaluations, first failures {failures:?}"))
}

// ------------------------------------------------------------------ 14

fn c14() -> (bool, String) {
    let gens: Vec<Symbol> = ["p", "q", "s"].iter().map(|s| Symbol::named(s).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let letter = |rng: &mut ChaCha8Rng| Letter::new(gens[rng.gen_range(0..3)], if rng.gen_bool(0.5) { 1 } else { -1 });
    let rand_word = |rng: &mut ChaCha8Rng, max: usize| {
        let len = rng.gen_range(0..=max);
        reduce((0..len).map(|_| letter(rng)).collect::<Vec<_>>())
    };
    let rand_elem = |rng: &mut ChaCha8Rng| {
        let mut e = AlgebraElement::zero();
        for _ in 0..rng.gen_range(0..4) {
            e.add_term(rand_word(rng, 3), BigInt::from(rng.gen_range(-2..=2)));
        }
        e
    };
    let mut failures = 0;
    let instances = 1000;
    for _ in 0..instances {
        let raw: Vec<Letter> = (0..rng.gen_range(0..14)).map(|_| letter(&mut rng)).collect();
        let w = reduce(raw.clone());
        let idempotent = reduce(w.letters().to_vec()) == w;
        let no_cancellation = w.letters().windows(2).all(|p| p[0].sym != p[1].sym || p[0].exp == p[1].exp);
        let inverse = w.mul(&w.inv()).is_empty() && w.inv().inv() == w;

        let (a, b, c) = (rand_elem(&mut rng), rand_elem(&mut rng), rand_elem(&mut rng));
        let ring = &(&a * &b) * &c == &a * &(&b * &c)
            && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
            && &(&b + &c) * &a == &(&b * &a) + &(&c * &a)
            && &(&a + &b) + &c == &a + &(&b + &c)
            && &a + &b == &b + &a
            && (&a + &(-&a)).is_zero()
            && &a * &AlgebraElement::one() == a
            && &AlgebraElement::one() * &a == a;

        let subgroup: Vec<Word> = (0..rng.gen_range(1..=3)).map(|_| rand_word(&mut rng, 4)).collect();
        let mut member = Word::empty();
        for _ in 0..rng.gen_range(0..6) {
            let g = &subgroup[rng.gen_range(0..subgroup.len())];
            if rng.gen_bool(0.5) {
                member.append(g);
            } else {
                member.append_inv(g);
            }
        }
        let rebuild = |f: &[ncsurf::wordcore::Factor]| {
            let mut out = Word::empty();
            for x in f {
                if x.exp == 1 {
                    out.append(&subgroup[x.generator]);
                } else {
                    out.append_inv(&subgroup[x.generator]);
                }
            }
            out
        };
        let found = stallings_membership(&subgroup, &member).is_some_and(|f| rebuild(&f) == member);
        let probe = rand_word(&mut rng, 6);
        let probe_sound = stallings_membership(&subgroup, &probe).map_or(true, |f| rebuild(&f) == probe);

        if !(idempotent && no_cancellation && inverse && ring && found && probe_sound) {
            failures += 1;
        }
    }
    (failures == 0, format!("{instances} instances, {failures} failures"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> (bool, String)); 14] = [
        ("pentagon expansion", c1),
        ("hexagon expansion", c2),
        ("sector expansions", c3),
        ("relation suite", c4),
        ("flip compatibility", c5),
        ("commutative specialization", c6),
        ("total angle invariance", c7),
        ("annulus r=2", c8),
        ("strip", c9),
        ("once-punctured triangle", c10),
        ("retraction", c11),
        ("rank table", c12),
        ("quasi-Plucker model", c13),
        ("word and algebra properties", c14),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = f();
        // bypass libtest capture so the lines show up in a plain `cargo test` run
        writeln!(
            std::io::stdout().lock(),
            "{} [{:>2}] {name}: {detail} ({} ms)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_millis()
        )
        .unwrap();
        if !ok {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

