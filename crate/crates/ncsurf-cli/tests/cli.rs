use std::process::{Command, Output};

use ncsurf::polygon::Triangulation;
use ncsurf::presentation::rewriter;
use ncsurf::wordcore::{AlgebraElement, Word};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncsurf")).args(args).env_remove("NCSURF_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn expand_pentagon_as_json() {
    let out = run(&["--format", "json", "expand", "--tri", "n=5;diag=1-3,1-4", "--edge", "2,5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["terms"], 3);
    let got = AlgebraElement::from_json(&v["element"].to_string()).unwrap();

    let t: Triangulation = "n=5;diag=1-3,1-4".parse().unwrap();
    let rw = rewriter(&t);
    let want = AlgebraElement::from_words(
        ["t(2,1).t(4,1)^-1.t(4,5)", "t(2,3).t(1,3)^-1.t(1,5)", "t(2,1).t(3,1)^-1.t(3,4).t(1,4)^-1.t(1,5)"]
            .iter()
            .map(|s| rw.rewrite_word(&s.parse::<Word>().unwrap())),
    );
    assert_eq!(got, want);
}

#[test]
fn raw_expansion_as_text() {
    let out = run(&["expand", "--tri", "n=5;diag=1-3,1-4", "--edge", "2,5", "--raw"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("t(2,1).t(4,1)^-1.t(4,5)"), "{text}");
}

#[test]
fn torus_rank() {
    let out = run(&["--format", "json", "rank", "--chi", "0", "--marked", "1", "--closed", "torus"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["group"], "OneRelator(5)");
}

#[test]
fn annulus_conservation_passes() {
    let out = run(&["cylinder", "--r", "2", "--n-max", "20", "--check", "conserved"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("PASS"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["rank", "--chi", "3"]).status.code(), Some(2));
    assert_eq!(run(&["expand", "--tri", "n=5;diag=1-3,2-4", "--edge", "2,5"]).status.code(), Some(2));
    assert_eq!(run(&["suite", "--n-max", "12"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn false_identity_exits_with_one() {
    let out = run(&["oracle-verify", "--lhs", "t(1,3).t(2,3)^-1", "--rhs", "t(1,2)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("FAIL"));
}

#[test]
fn kernel_remark_under_quasiminors() {
    let args = |lhs: &str| {
        run(&["oracle-verify", "--lhs", lhs, "--rhs", "0", "--model", "quasiminor-bottom", "--points", "3"])
    };
    assert_eq!(args("t(1,2).t(3,2)^-1 + 1 - t(1,3).t(2,3)^-1").status.code(), Some(0));
    assert_eq!(args("t(1,3).t(2,3)^-1 + 1 - t(1,2).t(3,2)^-1").status.code(), Some(1));
}

#[test]
fn output_is_deterministic_and_seeded() {
    let base = ["--format", "json", "angle-check", "--n", "5"];
    let a = run(&base);
    let b = run(&base);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let flag = run(&["--seed", "9", "--format", "json", "angle-check", "--n", "5"]);
    let env = Command::new(env!("CARGO_BIN_EXE_ncsurf"))
        .args(base)
        .env("NCSURF_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
}

#[test]
fn suite_subset() {
    let out = run(&["--format", "json", "suite", "--only", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"], "PASS");
    let results = v["criteria"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    assert!(results.iter().all(|r| r["passed"] == true));
}
