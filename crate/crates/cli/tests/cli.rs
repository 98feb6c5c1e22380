use std::path::Path;
use std::process::{Command, Output};

use blochball_cli::report::parse_json;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blochball"))
}

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn verify(cfg: &Path, extra: &[&str]) -> Output {
    bin().arg("verify").arg("--config").arg(cfg).args(extra).output().unwrap()
}

const SMALL: &str = r#"{"dimension": 4, "seed": 11, "samples": 400}"#;

#[test]
fn json_is_reproducible_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let a = verify(&cfg, &["--suite", "mobius", "--suite", "seminorms"]);
    let b = verify(&cfg, &["--suite", "seminorms", "--suite", "mobius"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let doc = parse_json(&a.stdout).unwrap();
    assert_eq!(doc.suites.len(), 2);
    assert_eq!(doc.summary.fail, 0);
    let again = blochball_cli::emit_report(&doc.suites, blochball_cli::Format::Json).unwrap();
    assert_eq!(again, a.stdout);
}

#[test]
fn seed_and_dimension_flags_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let a = verify(&cfg, &["--suite", "metrics", "--seed", "5", "--dim", "3"]);
    let doc = parse_json(&a.stdout).unwrap();
    assert_eq!(doc.suites[0].dimension, 3);
    assert!(doc.suites[0].checks[0].witness.as_ref().unwrap().to_string().matches("],[").count() >= 2);
    let b = verify(&cfg, &["--suite", "metrics", "--seed", "6", "--dim", "3"]);
    let other = parse_json(&b.stdout).unwrap();
    assert_ne!(doc.suites[0].seed, other.suites[0].seed);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn injected_failure_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"dimension": 4, "samples": 200, "inject_failure": true}"#);
    let out = verify(&cfg, &["--suite", "mobius", "--format", "text"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("injected_failure"));
    assert!(text.contains("1 fail"));
}

#[test]
fn bad_inputs_exit_with_messages() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", "{\n  \"dimension\": 4,\n  \"suites\": [\"mobius\", \"nope\"]\n}");
    let out = verify(&cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("nope") && err.contains("mobius"), "{err}");

    let cfg = write(dir.path(), "d.json", "{\n  \"dimension\": 4,\n  \"seed\": }");
    let err = String::from_utf8(verify(&cfg, &[]).stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");

    let cfg = write(dir.path(), "e.json", SMALL);
    let out = verify(&cfg, &["--suite", "unknown"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_report_and_companion_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"dimension": 4, "samples": 200}"#);
    let out_path = dir.path().join("report.csv");
    let out = verify(&cfg, &["--suite", "necessity", "--format", "csv", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(&out_path).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["suite", "id", "status", "slack", "anchor", "detail", "witness"]);
    assert_eq!(rdr.records().count(), 4);
    let sweeps: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("necessity_linear_"))
        .collect();
    assert!(!sweeps.is_empty());
    let body = std::fs::read_to_string(dir.path().join(&sweeps[0])).unwrap();
    assert!(body.starts_with("bin_low,bin_high,sup,witness_norm,witness_phi_norm\n"));
}

#[test]
fn diagnose_and_sweep_commands() {
    let dir = tempfile::tempdir().unwrap();
    let sym = write(dir.path(), "s.json", r#"{"family": "identity", "n": 3}"#);
    let out = bin().args(["diagnose", "--budget", "8", "--symbol"]).arg(&sym).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "noncompact_necessary_violated");
    assert_eq!(v["n"], 3);

    let csv_path = dir.path().join("q2.csv");
    let out = bin().args(["sweep", "--quantity", "q2", "--mode", "phi", "--symbol"]).arg(&sym).arg("--out").arg(&csv_path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let sups: Vec<f64> = rdr.records().filter_map(|r| r.unwrap()[2].parse().ok()).collect();
    assert!(!sups.is_empty());
    assert!(sups.iter().all(|s| (0.0..=1.0 + 1e-9).contains(s)));

    let bad = write(dir.path(), "b.json", r#"{"family": "constant", "c": [[1.5, 0.0]]}"#);
    let out = bin().args(["diagnose", "--symbol"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
