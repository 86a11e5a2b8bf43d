use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ncsurf::laurent::{expand_x, expand_x_raw, expand_y};
use ncsurf::oracle::{eval, quasiminor_assignment, random_assignment, verify_with, Expr, TwoRowMatrix};
use ncsurf::polygon::{Chord, Triangulation};
use ncsurf::presentation::rewriter;
use ncsurf::suite::{angle_invariance, flip_check, retraction_check, run_criterion, SuiteOptions, CRITERIA};
use ncsurf::surfaces::{
    closed_surface_chi, cylinder_run, pn1_example_lift, pn1_expand, strip_conserved, strip_relations,
    triangle_group_type, CylinderOptions, StripModel, StripSign, SurfaceInvariants,
};
use ncsurf::wordcore::{AlgebraElement, StripKind, Symbol};

#[derive(Parser)]
#[command(name = "ncsurf", version, about = "Noncommutative Laurent expansions and their verification")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Base seed for every random choice.
    #[arg(long, env = "NCSURF_SEED", default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Expansion of a chord in the triangle group of a triangulation.
    Expand {
        #[arg(long)]
        tri: String,
        /// Endpoints `p,q`.
        #[arg(long, value_parser = parse_pair)]
        edge: (u32, u32),
        /// Print over oriented edges instead of the free basis.
        #[arg(long)]
        raw: bool,
    },
    /// Expansion of the sector `y_ab^c`; `(c,a)` must be an edge.
    ExpandY {
        #[arg(long)]
        tri: String,
        /// `a,b,c` for `y_ab^c`.
        #[arg(long, value_parser = parse_triple)]
        sector: (u32, u32, u32),
    },
    /// Checks the flip homomorphism against the expansions of the flipped triangulation.
    FlipCheck {
        #[arg(long)]
        tri: String,
        /// Diagonal `a-b` to flip; all diagonals when omitted.
        #[arg(long)]
        diag: Option<String>,
    },
    /// Total angle invariance over all triangulations of the n-gon.
    AngleCheck {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Retraction of the big triangle group, for every triangulation of the n-gon.
    RetractionCheck {
        #[arg(long)]
        n: u32,
    },
    /// Annulus recursion, positivity and conserved quantity.
    Cylinder {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 20)]
        n_max: i64,
        #[arg(long, value_enum, default_value_t = CylinderCheck::All)]
        check: CylinderCheck,
        /// Also decide subgroup membership of every monomial.
        #[arg(long)]
        membership: bool,
    },
    /// Curves on the strip, or the strip relations at `(i,j)`.
    Strip {
        #[arg(long, allow_hyphen_values = true)]
        i: i32,
        #[arg(long, allow_hyphen_values = true)]
        j: i32,
        #[arg(long, value_enum, default_value_t = StripCurve::U)]
        kind: StripCurve,
        /// Check the four relations at `(i,j)` and both conserved quantities at `i`.
        #[arg(long)]
        relations: bool,
    },
    /// Projected expansion on the once-punctured polygon.
    Pn1 {
        /// Endpoints `p,q` of the lifted curve in the double cover.
        #[arg(long, value_parser = parse_pair)]
        edge: (u32, u32),
        /// Lifted triangulation of the 2n-gon; defaults to the example triangulation for n = 3.
        #[arg(long)]
        lift: Option<String>,
    },
    /// Type of the triangle group of a marked surface.
    Rank {
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<i64>,
        #[arg(long)]
        marked: u32,
        #[arg(long, default_value_t = 0)]
        boundary: u32,
        #[arg(long, default_value_t = 0)]
        special: u32,
        /// Name of a closed surface: sphere, projective-plane, torus, klein-bottle, orientable:G, nonorientable:G.
        #[arg(long)]
        closed: Option<String>,
    },
    /// Compares two elements under random matrix substitutions.
    OracleVerify {
        /// Left side, as text (`a.b^-1 + 2*c`) or JSON.
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
        /// Where the matrices come from.
        #[arg(long, value_enum, default_value_t = Model::Free)]
        model: Model,
        /// Number of columns for the quasiminor models.
        #[arg(long, default_value_t = 5)]
        points: u32,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Runs the full verification battery.
    Suite {
        #[arg(long, default_value_t = 7)]
        n_max: u32,
        /// Comma-separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CylinderCheck {
    Conserved,
    Recursion,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StripCurve {
    U,
    V,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    /// Independent random invertible matrices.
    Free,
    /// `t(i,j)` sent to first-row quasiminors of a random two-row matrix.
    QuasiminorTop,
    /// `t(i,j)` sent to second-row quasiminors.
    QuasiminorBottom,
}

enum Failure {
    Usage(String),
    Verification,
}

type Outcome = Result<(Value, String), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or("expected p,q")?;
    Ok((a.trim().parse().map_err(|_| "bad vertex")?, b.trim().parse().map_err(|_| "bad vertex")?))
}

fn parse_triple(s: &str) -> Result<(u32, u32, u32), String> {
    let v: Vec<u32> = s.split(',').map(|x| x.trim().parse().map_err(|_| "bad vertex")).collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err("expected a,b,c".into()),
    }
}

fn parse_tri(s: &str) -> Result<Triangulation, Failure> {
    s.parse().map_err(usage)
}

fn parse_element(s: &str) -> Result<AlgebraElement, Failure> {
    let s = s.trim();
    if s.starts_with('{') {
        AlgebraElement::from_json(s).map_err(usage)
    } else {
        s.parse().map_err(usage)
    }
}

fn check_vertices(t: &Triangulation, vs: &[u32]) -> Result<(), Failure> {
    if let Some(v) = vs.iter().find(|&&v| v == 0 || v > t.n()) {
        return Err(usage(format!("vertex {v} is not in 1..={}", t.n())));
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: &Cli) -> Outcome {
    let seed = cli.seed;
    match &cli.command {
        Command::Expand { tri, edge: (p, q), raw } => {
            let t = parse_tri(tri)?;
            check_vertices(&t, &[*p, *q])?;
            if p == q {
                return Err(usage("endpoints must differ"));
            }
            let e = if *raw { expand_x_raw(&t, *p, *q) } else { expand_x(&t, *p, *q, &rewriter(&t)) };
            let v = json!({"triangulation": t.to_string(), "edge": [p, q], "terms": e.len(), "element": e.to_json_value()});
            Ok((v, e.to_string()))
        }
        Command::ExpandY { tri, sector: (a, b, c) } => {
            let t = parse_tri(tri)?;
            check_vertices(&t, &[*a, *b, *c])?;
            let e = expand_y(&t, *c, *b, *a, &rewriter(&t)).map_err(usage)?;
            let v = json!({"triangulation": t.to_string(), "sector": [a, b, c], "terms": e.len(), "element": e.to_json_value()});
            Ok((v, e.to_string()))
        }
        Command::FlipCheck { tri, diag } => {
            let t = parse_tri(tri)?;
            let diags: Vec<Chord> = match diag {
                Some(d) => {
                    let (a, b) = d.split_once('-').ok_or_else(|| usage("expected a-b"))?;
                    let (a, b): (u32, u32) = (a.parse().map_err(usage)?, b.parse().map_err(usage)?);
                    check_vertices(&t, &[a, b])?;
                    if a == b || !t.is_diagonal(Chord::new(a, b)) {
                        return Err(usage(format!("{a}-{b} is not a diagonal of {t}")));
                    }
                    vec![Chord::new(a, b)]
                }
                None => t.diagonals().to_vec(),
            };
            let mut rows = Vec::new();
            let mut text = Vec::new();
            let mut ok = true;
            for (x, d) in diags.iter().enumerate() {
                let c = flip_check(&t, *d, seed.wrapping_add(x as u64)).map_err(usage)?;
                ok &= c.failures == 0;
                text.push(format!(
                    "{} flip {d}: {} symbolic, {} by evaluation, {} failures",
                    verdict(c.failures == 0),
                    c.symbolic,
                    c.oracle,
                    c.failures
                ));
                rows.push(json!({"diagonal": d.to_string(), "check": c}));
            }
            finish(ok, json!({"triangulation": t.to_string(), "flips": rows, "result": verdict(ok)}), text.join("\n"))
        }
        Command::AngleCheck { n, oracle } => {
            if !(3..=9).contains(n) {
                return Err(usage("n must be in 3..=9"));
            }
            check_dims(oracle)?;
            let r = angle_invariance(*n, &oracle.dims, oracle.trials, seed);
            let text = format!("{} {}", verdict(r.passed()), r.identity);
            finish(r.passed(), serde_json::to_value(&r).expect("serializable"), text)
        }
        Command::RetractionCheck { n } => {
            if !(3..=9).contains(n) {
                return Err(usage("n must be in 3..=9"));
            }
            let c = retraction_check(*n);
            let ok = c.failures == 0;
            let text = format!(
                "{} {} relators over {} triangulations, {} failures",
                verdict(ok),
                c.relators,
                c.triangulations,
                c.failures
            );
            finish(ok, serde_json::to_value(c).expect("serializable"), text)
        }
        Command::Cylinder { r, n_max, check, membership } => {
            if *r == 0 {
                return Err(usage("r must be positive"));
            }
            if *n_max < 1 {
                return Err(usage("n-max must be positive"));
            }
            let mut opts = CylinderOptions::new(1 - *r as i64, *n_max);
            opts.seed = seed;
            opts.membership = *membership;
            eprintln!("expanding U_n for n up to {}", n_max + *r as i64);
            let (h, report) = cylinder_run(*r, &opts).map_err(usage)?;
            let ok = report.positive
                && (*check == CylinderCheck::Conserved || report.recursion_failures.is_empty())
                && (*check == CylinderCheck::Recursion || report.conservation_failures.is_empty())
                && report.membership_failures.is_empty();
            let text = format!(
                "{} r={} n<={}: positive={}, recursion failures {:?}, conservation failures {:?}\nH = {h}",
                verdict(ok),
                r,
                n_max,
                report.positive,
                report.recursion_failures,
                report.conservation_failures
            );
            let v = json!({"result": verdict(ok), "h": h.to_json_value(), "report": report});
            finish(ok, v, text)
        }
        Command::Strip { i, j, kind, relations } => {
            let (lo, hi) = ((*i).min(*j) - 2, (*i).max(*j) + 2);
            let m = StripModel::new(lo, hi).map_err(usage)?;
            if *relations {
                let rel = strip_relations(&m, *i, *j).map_err(usage)?;
                let hp = strip_conserved(&m, *i, [*j], StripSign::Plus).map_err(usage)?;
                let hm = strip_conserved(&m, *i, [*j], StripSign::Minus).map_err(usage)?;
                let ok = rel.all() && hp.is_empty() && hm.is_empty();
                let text = format!(
                    "{} relations at ({i},{j}): {:?}; H+ {}, H- {}",
                    verdict(ok),
                    rel,
                    verdict(hp.is_empty()),
                    verdict(hm.is_empty())
                );
                let v = json!({"result": verdict(ok), "relations": rel, "h_plus": hp.is_empty(), "h_minus": hm.is_empty()});
                return finish(ok, v, text);
            }
            let k = if *kind == StripCurve::U { StripKind::U } else { StripKind::V };
            let e = m.expand(k, *i, *j).map_err(usage)?;
            let v = json!({"curve": Symbol::Strip(k, *i, *j).to_string(), "terms": e.len(), "element": e.to_json_value()});
            Ok((v, e.to_string()))
        }
        Command::Pn1 { edge: (p, q), lift } => {
            let t = match lift {
                Some(s) => parse_tri(s)?,
                None => pn1_example_lift(),
            };
            if t.n() % 2 != 0 {
                return Err(usage("the lift must triangulate a polygon with an even number of vertices"));
            }
            check_vertices(&t, &[*p, *q])?;
            if p == q {
                return Err(usage("endpoints must differ"));
            }
            let e = pn1_expand(t.n() / 2, &t, *p, *q);
            let v = json!({"lift": t.to_string(), "edge": [p, q], "terms": e.len(), "element": e.to_json_value()});
            Ok((v, e.to_string()))
        }
        Command::Rank { chi, marked, boundary, special, closed } => {
            let chi = match (closed, chi) {
                (Some(name), c) => {
                    let named = closed_surface_chi(name).ok_or_else(|| usage(format!("unknown closed surface {name:?}")))?;
                    if c.is_some_and(|c| c != named) {
                        return Err(usage(format!("{name} has Euler characteristic {named}")));
                    }
                    named
                }
                (None, Some(c)) => *c,
                (None, None) => return Err(usage("--chi is required for surfaces with boundary")),
            };
            let inv = SurfaceInvariants {
                euler_characteristic: chi,
                marked: *marked,
                boundary_marked: *boundary,
                special: *special,
                closed: closed.is_some(),
            };
            let g = triangle_group_type(&inv).map_err(usage)?;
            Ok((json!({"invariants": inv, "group": g.to_string()}), g.to_string()))
        }
        Command::OracleVerify { lhs, rhs, model, points, oracle } => {
            check_dims(oracle)?;
            let (l, r) = (parse_element(lhs)?, parse_element(rhs)?);
            let (le, re) = (Expr::from(l.clone()), Expr::from(r.clone()));
            let mut syms = std::collections::BTreeSet::new();
            le.symbols(&mut syms);
            re.symbols(&mut syms);
            let syms: Vec<Symbol> = syms.into_iter().collect();
            if *model != Model::Free {
                let bad = syms.iter().find(|s| !matches!(s, Symbol::Edge(i, j) if *i >= 1 && *j >= 1 && *i <= *points && *j <= *points && i != j));
                if let Some(s) = bad {
                    return Err(usage(format!("{s} is not an edge t(i,j) with i,j in 1..={points}")));
                }
            }
            let name = format!("{l} = {r}");
            let report = verify_with(&name, &oracle.dims, oracle.trials, seed, |k, s| {
                let a = match model {
                    Model::Free => random_assignment(&syms, k, s),
                    Model::QuasiminorTop | Model::QuasiminorBottom => {
                        let m = TwoRowMatrix::random(*points as usize, k, s);
                        quasiminor_assignment(&m, *points, *model == Model::QuasiminorTop, s)?
                    }
                };
                Ok(eval(&le, &a)? == eval(&re, &a)?)
            });
            let text = match report.witness_seed {
                Some(w) => format!("FAIL {name} (witness seed {w})"),
                None => format!("PASS {name}"),
            };
            finish(report.passed(), serde_json::to_value(&report).expect("serializable"), text)
        }
        Command::Suite { n_max, only } => {
            if !(3..=8).contains(n_max) {
                return Err(usage("n-max must be in 3..=8"));
            }
            if let Some(id) = only.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
                return Err(usage(format!("no criterion {id}")));
            }
            let opts = SuiteOptions { n_max: *n_max, seed };
            let mut results = Vec::new();
            for &(id, name) in CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.0)) {
                eprintln!("[{id:>2}] {name} ...");
                results.push(run_criterion(id, &opts));
            }
            let ok = results.iter().all(|r| r.passed);
            let text = results
                .iter()
                .map(|r| format!("{} {:>2} {} ({} ms): {}", verdict(r.passed), r.id, r.name, r.elapsed_ms, r.detail))
                .chain([format!("{} {}/{} criteria", verdict(ok), results.iter().filter(|r| r.passed).count(), results.len())])
                .collect::<Vec<_>>()
                .join("\n");
            finish(ok, json!({"result": verdict(ok), "criteria": results}), text)
        }
    }
}

fn check_dims(o: &OracleArgs) -> Result<(), Failure> {
    if o.dims.is_empty() || o.dims.iter().any(|&k| k == 0 || k > 8) {
        return Err(usage("dims must be in 1..=8"));
    }
    if o.trials == 0 {
        return Err(usage("trials must be positive"));
    }
    Ok(())
}

/// Prints the report, then turns a failed verification into exit code 1.
fn finish(ok: bool, v: Value, text: String) -> Outcome {
    if ok {
        Ok((v, text))
    } else {
        emit(&v, &text);
        Err(Failure::Verification)
    }
}

static FORMAT: std::sync::OnceLock<Format> = std::sync::OnceLock::new();

fn emit(v: &Value, text: &str) {
    match FORMAT.get() {
        Some(Format::Json) => println!("{v}"),
        _ => println!("{text}"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    FORMAT.set(cli.format).ok();
    match run(&cli) {
        Ok((v, text)) => {
            emit(&v, &text);
            ExitCode::SUCCESS
        }
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
