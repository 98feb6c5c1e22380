//! Check records, the per-suite context and the sampling helpers shared by suites.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use blochball_core::diagnostics::{BinEstimate, CriterionEstimate};
use blochball_core::sampling::{seeded, SampleRng};
use blochball_core::QuadratureConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, Suite};
use crate::suites::CHECKS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Vacuous,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
            Status::Vacuous => "vacuous",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    /// Worst sample, or the inputs that produced the reported value.
    pub witness: Option<Value>,
    /// Distance to the tolerance boundary; negative on failure.
    pub slack: Option<f64>,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

/// One row per boundary bin of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub bin_low: f64,
    pub bin_high: f64,
    pub sup: Option<f64>,
    pub witness_norm: Option<f64>,
    pub witness_phi_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub symbol: String,
    pub quantity: String,
    pub trend: String,
    pub limit_estimate: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepRecord {
    pub fn from_estimate(symbol: &str, e: &CriterionEstimate) -> Self {
        Self {
            symbol: symbol.to_string(),
            quantity: e.label.clone(),
            trend: serde_json::to_value(e.trend).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
            limit_estimate: e.limit_estimate,
            rows: e.per_bin.iter().map(SweepRow::from).collect(),
        }
    }
}

impl From<&BinEstimate> for SweepRow {
    fn from(b: &BinEstimate) -> Self {
        Self { bin_low: b.low, bin_high: b.high, sup: b.sup, witness_norm: b.witness_norm, witness_phi_norm: b.witness_phi_norm }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub dimension: usize,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    #[serde(default)]
    pub sweeps: Vec<SweepRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl SuiteReport {
    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }
}

/// Result of one check before it is stamped with its id and anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub witness: Option<Value>,
    pub slack: Option<f64>,
    pub detail: String,
    pub sweeps: Vec<SweepRecord>,
}

impl Outcome {
    /// Pass iff `slack >= 0`; NaN fails.
    pub fn from_slack(slack: f64, witness: Option<Value>, detail: impl Into<String>) -> Self {
        let status = if slack >= 0.0 { Status::Pass } else { Status::Fail };
        Self { status, witness, slack: Some(slack), detail: detail.into(), sweeps: Vec::new() }
    }

    pub fn fail(detail: impl Into<String>) -> Self {
        Self { status: Status::Fail, witness: None, slack: None, detail: detail.into(), sweeps: Vec::new() }
    }

    pub fn skip(detail: impl Into<String>) -> Self {
        Self { status: Status::Skip, witness: None, slack: None, detail: detail.into(), sweeps: Vec::new() }
    }

    pub fn vacuous(detail: impl Into<String>) -> Self {
        Self { status: Status::Vacuous, witness: None, slack: None, detail: detail.into(), sweeps: Vec::new() }
    }

    /// `lo <= value <= hi`, with slack the distance to the nearer end.
    pub fn within(value: f64, lo: f64, hi: f64, witness: Option<Value>, what: &str) -> Self {
        let slack = (value - lo).min(hi - value);
        Self::from_slack(slack, witness, format!("{what} = {value:.9} in [{lo:.9}, {hi:.9}]"))
    }

    /// Passes iff every condition holds; the failing ones are listed.
    pub fn all(conds: &[(bool, String)], witness: Option<Value>) -> Self {
        let bad: Vec<&str> = conds.iter().filter(|c| !c.0).map(|c| c.1.as_str()).collect();
        if bad.is_empty() {
            let detail = conds.iter().map(|c| c.1.as_str()).collect::<Vec<_>>().join("; ");
            Self { status: Status::Pass, witness, slack: None, detail, sweeps: Vec::new() }
        } else {
            Self { status: Status::Fail, witness, slack: None, detail: bad.join("; "), sweeps: Vec::new() }
        }
    }

    pub fn with_sweeps(mut self, sweeps: Vec<SweepRecord>) -> Self {
        self.sweeps.extend(sweeps);
        self
    }
}

pub type CheckResult = Result<Outcome, String>;

/// First 8 bytes (little-endian) of `sha256(seed || label)`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

/// Read-only inputs handed to a check.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    pub cfg: &'a RunConfig,
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    pub quad: QuadratureConfig,
}

impl Env<'_> {
    /// Sample count for cheap checks.
    pub fn samples(&self) -> usize {
        self.cfg.samples
    }

    /// Sample count for quadrature-heavy checks.
    pub fn heavy(&self) -> usize {
        (self.cfg.samples / 10).max(1)
    }

    /// Sample count for checks that run a full search per sample.
    pub fn searches(&self) -> usize {
        (self.cfg.samples / 1000).clamp(1, 16)
    }

    pub fn sub_seed(&self, label: &str) -> u64 {
        derive_seed(self.seed, label)
    }
}

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub suite: Suite,
    pub seed: u64,
    checks: Vec<CheckRecord>,
    sweeps: Vec<SweepRecord>,
}

impl<'a> Ctx<'a> {
    pub fn new(cfg: &'a RunConfig, suite: Suite) -> Self {
        Self { cfg, suite, seed: derive_seed(cfg.seed, suite.as_str()), checks: Vec::new(), sweeps: Vec::new() }
    }

    /// Runs one registered check; panics and errors are recorded as failures.
    pub fn check<F>(&mut self, id: &'static str, default_tol: f64, f: F)
    where
        F: FnOnce(&Env) -> CheckResult,
    {
        let anchor = CHECKS.iter().find(|c| c.id == id).map(|c| c.anchor).unwrap_or_else(|| panic!("unregistered check {id}"));
        let quad = QuadratureConfig::with_nodes(self.cfg.quadrature_nodes).unwrap_or_default();
        let env = Env { cfg: self.cfg, n: self.cfg.dimension, seed: derive_seed(self.seed, id), tol: self.cfg.tolerance(id, default_tol), quad };
        let start = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(|| f(&env))) {
            Ok(Ok(o)) => o,
            Ok(Err(e)) => Outcome::fail(format!("error: {e}")),
            Err(p) => Outcome::fail(format!("panic: {}", panic_message(&p))),
        };
        let elapsed = start.elapsed().as_secs_f64();
        self.sweeps.extend(outcome.sweeps);
        self.checks.push(CheckRecord {
            id: id.to_string(),
            anchor: anchor.to_string(),
            status: outcome.status,
            witness: outcome.witness,
            slack: outcome.slack.map(finite_or_neg),
            detail: outcome.detail,
            wall_time: self.cfg.include_timing.then_some(elapsed),
        });
    }

    pub fn finish(self, wall_time: Option<f64>) -> SuiteReport {
        SuiteReport {
            suite: self.suite.as_str().to_string(),
            dimension: self.cfg.dimension,
            seed: self.seed,
            checks: self.checks,
            sweeps: self.sweeps,
            wall_time,
        }
    }
}

/// NaN and infinite slacks serialize as `-1e308` so reports stay valid JSON.
fn finite_or_neg(s: f64) -> f64 {
    if s.is_finite() {
        s
    } else if s > 0.0 {
        f64::MAX
    } else {
        -f64::MAX
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".into()
    }
}

/// Evaluates `f` on `count` independently seeded samples and reports the largest
/// error against `tol`. `f` returns the error (negative when comfortably
/// inside, `-inf` for a sample the check does not apply to) and a witness. Sample `i` always sees the same RNG stream, so results
/// do not depend on scheduling.
pub fn worst_case<F>(seed: u64, count: usize, tol: f64, f: F) -> CheckResult
where
    F: Fn(&mut SampleRng) -> blochball_core::Result<(f64, Value)> + Sync,
{
    let results: Vec<blochball_core::Result<(f64, Value)>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(derive_seed(seed, &i.to_string()));
            f(&mut rng)
        })
        .collect();
    let mut worst: Option<(usize, f64, Value)> = None;
    for (i, r) in results.into_iter().enumerate() {
        let (e, w) = r.map_err(|e| format!("sample {i}: {e}"))?;
        let e = if e.is_nan() { f64::INFINITY } else { e };
        if worst.as_ref().is_none_or(|(_, we, _)| e > *we) {
            worst = Some((i, e, w));
        }
    }
    let Some((i, e, w)) = worst else {
        return Ok(Outcome::vacuous("no samples"));
    };
    if e == f64::NEG_INFINITY {
        return Ok(Outcome::vacuous(format!("all {count} samples were outside the hypothesis")));
    }
    Ok(Outcome::from_slack(tol - e, Some(w), format!("worst error {e:.3e} at sample {i} of {count} (tol {tol:.1e})")))
}

/// `|a - b| / max(1, |b|)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(derive_seed(42, "mobius"), derive_seed(42, "mobius"));
        assert_ne!(derive_seed(42, "mobius"), derive_seed(42, "metrics"));
        assert_ne!(derive_seed(42, "mobius"), derive_seed(43, "mobius"));
    }

    #[test]
    fn worst_case_picks_the_largest_error() {
        use rand::Rng;
        let o = worst_case(1, 200, 0.5, |rng| {
            let x: f64 = rng.random();
            Ok((x, serde_json::json!(x)))
        })
        .unwrap();
        assert_eq!(o.status, Status::Fail);
        let w = o.witness.unwrap().as_f64().unwrap();
        assert!((o.slack.unwrap() - (0.5 - w)).abs() < 1e-15);
        let again = worst_case(1, 200, 0.5, |rng| Ok((rng.random::<f64>(), serde_json::Value::Null))).unwrap();
        assert_eq!(again.slack, o.slack);
    }

    #[test]
    fn nan_errors_fail() {
        let o = worst_case(3, 4, 1.0, |_| Ok((f64::NAN, Value::Null))).unwrap();
        assert_eq!(o.status, Status::Fail);
    }

    #[test]
    fn within_bounds() {
        assert_eq!(Outcome::within(0.5, 0.0, 1.0, None, "v").status, Status::Pass);
        assert_eq!(Outcome::within(1.5, 0.0, 1.0, None, "v").status, Status::Fail);
    }
}
