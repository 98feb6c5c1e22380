//! Report serialization: JSON documents, CSV rows, text tables and the
//! per-sweep companion CSV files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::check::{Status, SuiteReport, SweepRecord};
use crate::config::Format;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub vacuous: usize,
}

impl Summary {
    pub fn of(reports: &[SuiteReport]) -> Self {
        let mut s = Self::default();
        for c in reports.iter().flat_map(|r| &r.checks) {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Skip => s.skip += 1,
                Status::Vacuous => s.vacuous += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub summary: Summary,
    pub suites: Vec<SuiteReport>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn emit_report(reports: &[SuiteReport], format: Format) -> Result<Vec<u8>, ReportError> {
    match format {
        Format::Json => emit_json(reports),
        Format::Csv => emit_csv(reports),
        Format::Text => Ok(emit_text(reports).into_bytes()),
    }
}

fn emit_json(reports: &[SuiteReport]) -> Result<Vec<u8>, ReportError> {
    let doc = Document { summary: Summary::of(reports), suites: reports.to_vec() };
    let mut out = serde_json::to_vec_pretty(&doc)?;
    out.push(b'\n');
    Ok(out)
}

pub fn parse_json(bytes: &[u8]) -> Result<Document, ReportError> {
    Ok(serde_json::from_slice(bytes)?)
}

fn emit_csv(reports: &[SuiteReport]) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "id", "status", "slack", "anchor", "detail", "witness"])?;
    for r in reports {
        for c in &r.checks {
            let slack = c.slack.map(|s| s.to_string()).unwrap_or_default();
            let witness = c.witness.as_ref().map(|v| v.to_string()).unwrap_or_default();
            w.write_record([r.suite.as_str(), &c.id, c.status.as_str(), &slack, &c.anchor, &c.detail, &witness])?;
        }
    }
    w.into_inner().map_err(|e| ReportError::Io { path: "<memory>".into(), source: e.into_error() })
}

fn emit_text(reports: &[SuiteReport]) -> String {
    let rows: Vec<[String; 4]> = reports
        .iter()
        .flat_map(|r| {
            r.checks.iter().map(move |c| {
                let slack = c.slack.map(|s| format!("{s:.3e}")).unwrap_or_else(|| "-".into());
                [r.suite.clone(), c.id.clone(), c.status.as_str().to_string(), slack]
            })
        })
        .collect();
    let head = ["suite", "check", "status", "slack"];
    let mut width = head.map(str::len);
    for row in &rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: [&str; 4]| {
        let _ = writeln!(out, "{:<a$}  {:<b$}  {:<c$}  {:>d$}", cells[0], cells[1], cells[2], cells[3], a = width[0], b = width[1], c = width[2], d = width[3]);
    };
    line(&mut out, head);
    line(&mut out, [&"-".repeat(width[0]), &"-".repeat(width[1]), &"-".repeat(width[2]), &"-".repeat(width[3])]);
    for row in &rows {
        line(&mut out, [&row[0], &row[1], &row[2], &row[3]]);
    }
    let s = Summary::of(reports);
    let _ = writeln!(out, "\n{} checks: {} pass, {} fail, {} skip, {} vacuous", rows.len(), s.pass, s.fail, s.skip, s.vacuous);
    out
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

pub fn companion_name(suite: &str, sweep: &SweepRecord) -> String {
    format!("{}_{}_{}.csv", sanitize(suite), sanitize(&sweep.symbol), sanitize(&sweep.quantity))
}

pub fn sweep_csv(sweep: &SweepRecord) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bin_low", "bin_high", "sup", "witness_norm", "witness_phi_norm"])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &sweep.rows {
        w.write_record([r.bin_low.to_string(), r.bin_high.to_string(), opt(r.sup), opt(r.witness_norm), opt(r.witness_phi_norm)])?;
    }
    w.into_inner().map_err(|e| ReportError::Io { path: "<memory>".into(), source: e.into_error() })
}

/// Companion files for every sweep of every report, as `(file name, contents)`.
pub fn companion_csvs(reports: &[SuiteReport]) -> Result<Vec<(String, Vec<u8>)>, ReportError> {
    let mut out = Vec::new();
    for r in reports {
        for s in &r.sweeps {
            out.push((companion_name(&r.suite, s), sweep_csv(s)?));
        }
    }
    Ok(out)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ReportError> {
    std::fs::write(path, bytes).map_err(|source| ReportError::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::{CheckRecord, SweepRow};

    fn record(id: &str, status: Status) -> CheckRecord {
        CheckRecord { id: id.into(), anchor: "a, \"quoted\"".into(), status, witness: None, slack: Some(0.5), detail: String::new(), wall_time: None }
    }

    fn sample() -> Vec<SuiteReport> {
        vec![SuiteReport {
            suite: "mobius".into(),
            dimension: 4,
            seed: 7,
            checks: vec![record("mobius.involution", Status::Pass), record("mobius.swap_origin", Status::Fail)],
            sweeps: vec![SweepRecord {
                symbol: "identity".into(),
                quantity: "q1_phi".into(),
                trend: "to_zero".into(),
                limit_estimate: 0.0,
                rows: vec![SweepRow { bin_low: 0.0, bin_high: 0.5, sup: Some(0.1), witness_norm: Some(0.4), witness_phi_norm: None }],
            }],
            wall_time: None,
        }]
    }

    #[test]
    fn empty_documents_are_valid() {
        let j = emit_report(&[], Format::Json).unwrap();
        let doc = parse_json(&j).unwrap();
        assert!(doc.suites.is_empty());
        let c = emit_report(&[], Format::Csv).unwrap();
        assert_eq!(String::from_utf8(c).unwrap().lines().count(), 1);
        let t = String::from_utf8(emit_report(&[], Format::Text).unwrap()).unwrap();
        assert!(t.contains("0 checks"));
    }

    #[test]
    fn json_round_trips() {
        let reports = sample();
        let j = emit_report(&reports, Format::Json).unwrap();
        let doc = parse_json(&j).unwrap();
        assert_eq!(doc.suites, reports);
        assert_eq!(doc.summary, Summary { pass: 1, fail: 1, skip: 0, vacuous: 0 });
        assert_eq!(emit_report(&doc.suites, Format::Json).unwrap(), j);
    }

    #[test]
    fn csv_and_text() {
        let reports = sample();
        let c = String::from_utf8(emit_report(&reports, Format::Csv).unwrap()).unwrap();
        let mut rdr = csv::Reader::from_reader(c.as_bytes());
        let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(&rows[0][4], "a, \"quoted\"");
        let t = String::from_utf8(emit_report(&reports, Format::Text).unwrap()).unwrap();
        assert!(t.contains("1 pass, 1 fail"));
        let widths: Vec<usize> = t.lines().take(4).map(|l| l.find("status").or_else(|| l.find("pass")).or_else(|| l.find("fail")).unwrap_or(0)).collect();
        assert!(widths.windows(2).all(|w| w[0] == w[1] || w[1] == 0 || w[0] == 0));
    }

    #[test]
    fn companion_naming() {
        let files = companion_csvs(&sample()).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].0, "mobius_identity_q1_phi.csv");
        let body = String::from_utf8(files[0].1.clone()).unwrap();
        assert!(body.starts_with("bin_low,bin_high,sup,witness_norm,witness_phi_norm"));
    }
}
