//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use blochball_cli::{emit_report, run_suites, Format, RunConfig, Status, Suite, SuiteReport};

const DIMS: [usize; 3] = [4, 16, 64];
const SAMPLES: usize = 10_000;
const SEED: u64 = 2024;

const TOLERANCES: &[(&str, f64)] = &[
    ("mobius.involution", 1e-9),
    ("mobius.swap_origin", 1e-9),
    ("mobius.swap_parameter", 1e-9),
    ("mobius.derivative_inverse", 1e-9),
    ("mobius.kernel_identity", 1e-9),
    ("mobius.ball_preservation", 0.0),
    ("metrics.closed_form", 1e-9),
    ("metrics.disk_oracle", 1e-9),
    ("metrics.mobius_invariance", 1e-9),
    ("metrics.sharpened_triangle", 1e-9),
    ("metrics.quotient_bound", 1e-9),
    ("metrics.hyperbolic_triangle", 1e-9),
    ("metrics.outer_chain", 1e-9),
    ("metrics.functional_lower_bound", 1e-9),
    ("gradients.closed_form_norm", 1e-6),
    ("gradients.identity_remark", 1e-8),
    ("gradients.boundary_integral", 1e-8),
    ("schwarz_pick.ball_preservation", 0.0),
    ("schwarz_pick.sch1", 1e-9),
    ("schwarz_pick.sch2", 1e-9),
    ("schwarz_pick.sl2", 1e-9),
    ("schwarz_pick.sch3", 1e-9),
    ("seminorms.linear_derivative", 1e-3),
    ("seminorms.linear_radial", 1e-2),
    ("seminorms.pointwise_ordering", 1e-9),
    ("seminorms.metric_ratio_1d", 5e-2),
    ("boundedness.sqrt5", 1e-9),
    ("boundedness.sqrt5_envelope", 1e-9),
    ("boundedness.norm_contraction", 1e-6),
    ("examples.identity_q2", 2e-2),
    ("examples.power_components", 1e-9),
    ("examples.block_power_scalar", 1e-9),
    ("examples.product_com1", 1e-6),
];

struct Criterion {
    number: u32,
    title: &'static str,
    checks: &'static [&'static str],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        number: 1,
        title: "Mobius maps and metrics",
        checks: &[
            "mobius.involution",
            "mobius.swap_origin",
            "mobius.swap_parameter",
            "mobius.ball_preservation",
            "metrics.closed_form",
            "metrics.disk_oracle",
            "metrics.sharpened_triangle",
            "metrics.quotient_bound",
        ],
    },
    Criterion {
        number: 2,
        title: "invariant gradients",
        checks: &["gradients.closed_form_norm", "gradients.identity_remark", "gradients.boundary_integral"],
    },
    Criterion {
        number: 3,
        title: "Schwarz-Pick slacks",
        checks: &["schwarz_pick.sch1", "schwarz_pick.sch2", "schwarz_pick.sl2", "schwarz_pick.sch3"],
    },
    Criterion {
        number: 4,
        title: "Bloch seminorms",
        checks: &[
            "seminorms.linear_derivative",
            "seminorms.linear_radial",
            "seminorms.pointwise_ordering",
            "seminorms.metric_ratio_1d",
        ],
    },
    Criterion {
        number: 5,
        title: "boundedness",
        checks: &["boundedness.sqrt5", "boundedness.sqrt5_envelope", "boundedness.norm_contraction"],
    },
    Criterion {
        number: 6,
        title: "worked examples",
        checks: &[
            "examples.identity_q1",
            "examples.identity_q2",
            "examples.identity_verdict",
            "examples.power_components",
            "examples.power_verdict",
            "examples.block_power_scalar",
            "examples.block_power_verdict",
            "examples.product_com1",
        ],
    },
    Criterion { number: 7, title: "little Bloch membership", checks: &["necessity.b0_linear", "necessity.b0_mode_agreement"] },
];

fn config(n: usize) -> RunConfig {
    RunConfig {
        dimension: n,
        seed: SEED,
        samples: SAMPLES,
        suites: vec![
            Suite::Mobius,
            Suite::Metrics,
            Suite::Gradients,
            Suite::Seminorms,
            Suite::SchwarzPick,
            Suite::Boundedness,
            Suite::Necessity,
            Suite::Examples,
        ],
        tolerances: TOLERANCES.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        ..RunConfig::default()
    }
}

fn line(number: u32, title: &str, ok: bool, detail: &str) -> bool {
    println!("criterion {number} ({title}): {} {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn judge(c: &Criterion, runs: &BTreeMap<usize, Vec<SuiteReport>>) -> bool {
    let mut problems = Vec::new();
    for (n, reports) in runs {
        for id in c.checks {
            match reports.iter().flat_map(|r| &r.checks).find(|r| r.id == *id) {
                Some(r) if r.status == Status::Pass => {}
                Some(r) => problems.push(format!("n={n} {id}: {} ({})", r.status.as_str(), r.detail)),
                None => problems.push(format!("n={n} {id}: missing")),
            }
        }
    }
    let detail = if problems.is_empty() {
        format!("[{} checks at n = {:?}]", c.checks.len(), DIMS)
    } else {
        problems.join("; ")
    };
    line(c.number, c.title, problems.is_empty(), &detail)
}

fn run_binary(config: &str, threads: &str, dir: &std::path::Path, tag: &str) -> (Option<i32>, Vec<u8>) {
    let cfg_path = dir.join(format!("{tag}.json"));
    let out_path = dir.join(format!("{tag}_report.json"));
    std::fs::write(&cfg_path, config).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_blochball"))
        .args(["verify", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_path)
        .env("BLOCHBALL_THREADS", threads)
        .status()
        .expect("binary runs");
    (status.code(), std::fs::read(&out_path).unwrap_or_default())
}

fn determinism(first_n4: &[u8]) -> bool {
    let mut problems = Vec::new();
    let again = emit_report(&run_suites(&config(4)), Format::Json).unwrap();
    if again != first_n4 {
        problems.push("library rerun at n=4 differs".to_string());
    }
    let dir = tempfile::tempdir().unwrap();
    let base = r#"{"dimension": 8, "seed": 7, "samples": 2000, "suites": ["mobius", "metrics", "examples"]}"#;
    let (c1, r1) = run_binary(base, "1", dir.path(), "one");
    let (c2, r2) = run_binary(base, "3", dir.path(), "three");
    if c1 != Some(0) || c2 != Some(0) {
        problems.push(format!("clean runs exited with {c1:?} / {c2:?}"));
    }
    if r1.is_empty() || r1 != r2 {
        problems.push("binary reports differ across runs and thread counts".to_string());
    }
    let injected = r#"{"dimension": 8, "seed": 7, "samples": 2000, "suites": ["mobius"], "inject_failure": true}"#;
    let (c3, _) = run_binary(injected, "2", dir.path(), "injected");
    if c3 != Some(1) {
        problems.push(format!("injected failure exited with {c3:?}"));
    }
    let detail = if problems.is_empty() { "[byte-identical reports; exit 0 clean, 1 on injected failure]".to_string() } else { problems.join("; ") };
    line(8, "determinism and exit code", problems.is_empty(), &detail)
}

fn main() {
    let start = Instant::now();
    let mut runs = BTreeMap::new();
    for n in DIMS {
        let t = Instant::now();
        runs.insert(n, run_suites(&config(n)));
        eprintln!("n = {n}: {:.1}s", t.elapsed().as_secs_f64());
    }
    let first = emit_report(&runs[&4], Format::Json).unwrap();
    let mut ok = true;
    for c in CRITERIA {
        ok &= judge(c, &runs);
    }
    ok &= determinism(&first);
    println!("acceptance: {} in {:.1}s", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    if !ok {
        std::process::exit(1);
    }
}
