//! Combining the criteria into a compactness verdict.

use serde::{Deserialize, Serialize};

use super::pointwise::sqrt5_quantity;
use super::proxy::{compactness_proxy, CompactnessProxy, ProxyConfig, ProxyMode};
use super::sweep::{
    b0_membership, boundary_sweep, c4_pairs, c4_sweep, component_boundary_sweep, component_indices, component_sweep,
    default_sweep_budget, Quantity, SweepMode,
};
use super::{CriterionEstimate, CriterionName, Trend, TrendConfig};
use crate::error::Result;
use crate::point::Point;
use crate::search::{sup_search, SearchBudget};
use crate::symbols::SymbolMap;

/// Slack allowed above `sqrt 5` before the bound counts as violated.
pub const SQRT5_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoncompactNecessaryViolated,
    CompactSufficient,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Necessary,
    Sufficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reason {
    pub check: String,
    pub role: Role,
    pub outcome: Outcome,
    /// A failed necessary check with this flag proves non-compactness.
    pub decisive: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientPath {
    pub name: String,
    pub holds: bool,
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportConfig {
    pub sweep: SearchBudget,
    pub component: SearchBudget,
    pub scalar: SearchBudget,
    pub proxy: ProxyConfig,
    pub trend: TrendConfig,
    pub proxy_deltas: Vec<f64>,
    /// Most components examined by the cross-component and diagonal criteria.
    pub component_cap: usize,
    /// Components examined by the per-component boundary sweep.
    pub component_sweeps: usize,
    pub c4_random_pairs: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            sweep: default_sweep_budget(),
            component: SearchBudget { samples: 24, depth: 16, starts: 2, polish_evals: 600, seed: 0xa4 },
            scalar: SearchBudget { samples: 16, depth: 18, starts: 2, polish_evals: 300, seed: 0xc4 },
            proxy: ProxyConfig::default(),
            trend: TrendConfig::default(),
            proxy_deltas: vec![0.5, 0.9],
            component_cap: 12,
            component_sweeps: 3,
            c4_random_pairs: 32,
        }
    }
}

impl ReportConfig {
    /// Derives every sub-seed from one value.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.sweep.seed = seed;
        self.component.seed = seed ^ 0xa4;
        self.scalar.seed = seed ^ 0xc4;
        self.proxy.seed = seed ^ 0xc0;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessVerdict {
    pub family: String,
    pub n: usize,
    pub verdict: Verdict,
    pub reasons: Vec<Reason>,
    pub paths: Vec<SufficientPath>,
    pub estimates: Vec<CriterionEstimate>,
    pub proxies: Vec<CompactnessProxy>,
    pub sqrt5_sup: f64,
    pub sqrt5_witness: Option<Point>,
    pub config: ReportConfig,
}

impl CompactnessVerdict {
    pub fn estimate(&self, name: CriterionName) -> Option<&CriterionEstimate> {
        self.estimates.iter().find(|e| e.name == name)
    }
}

fn trend_outcome(e: &CriterionEstimate) -> Outcome {
    match (e.trend, e.vacuous) {
        (Trend::ToZero, true) => Outcome::Vacuous,
        (Trend::ToZero, false) => Outcome::Pass,
        (Trend::BoundedAway, _) => Outcome::Fail,
        (Trend::Inconclusive, _) => Outcome::Inconclusive,
    }
}

fn describe(e: &CriterionEstimate) -> String {
    let mut s = format!("{} [{}]: trend {:?}, limit ~ {:.4}", e.name.as_str(), e.label, e.trend, e.limit_estimate);
    if e.vacuous {
        s.push_str(&format!(", vacuous (empty bins {:?})", e.empty_bins));
    }
    s
}

fn passes(e: &CriterionEstimate) -> bool {
    e.trend == Trend::ToZero
}

fn proxy_check(p: &CompactnessProxy) -> String {
    format!("{:?} proxy at delta {}", p.mode, p.delta).to_lowercase()
}

fn proxy_detail(p: &CompactnessProxy) -> String {
    let sets: Vec<String> = p
        .sets
        .iter()
        .map(|s| {
            let covers: Vec<String> = s.coverings.iter().map(|c| format!("eps {:.3}: {} -> {}", c.eps, c.half, c.full)).collect();
            format!("{}: covers [{}], tail {:.2e}", s.label, covers.join(", "), s.tail_energy)
        })
        .collect();
    let mut d = sets.join("; ");
    if let Some(w) = &p.warning {
        d.push_str(&format!("; warning: {w}"));
    }
    d
}

/// Runs every criterion on `phi` and combines them.
///
/// Non-compact when a necessary criterion is decisively bounded away from 0
/// or the `sqrt 5` bound fails. Compact (sufficient) when one of the
/// sufficient paths holds in full. Inconclusive otherwise.
pub fn compactness_report(phi: &SymbolMap, cfg: &ReportConfig) -> Result<CompactnessVerdict> {
    let t = &cfg.trend;
    let c1 = boundary_sweep(phi, Quantity::Q1, SweepMode::Phi, &cfg.sweep, t)?;
    let c2 = boundary_sweep(phi, Quantity::Q2, SweepMode::Phi, &cfg.sweep, t)?;
    let c1p = boundary_sweep(phi, Quantity::Q1, SweepMode::Z, &cfg.sweep, t)?;
    let c11 = boundary_sweep(phi, Quantity::Q2, SweepMode::Z, &cfg.sweep, t)?;
    let b0 = b0_membership(phi, &cfg.sweep, t)?;
    let c3 = component_sweep(phi, &cfg.component, t, cfg.component_cap)?;
    let diag = component_indices(phi.active_components(), cfg.component_cap);
    let c3p: Vec<CriterionEstimate> = diag
        .iter()
        .take(cfg.component_sweeps)
        .map(|&k| component_boundary_sweep(phi, k, &cfg.sweep, t))
        .collect::<Result<_>>()?;
    let pairs = c4_pairs(phi, &diag, cfg.c4_random_pairs, cfg.scalar.seed)?;
    let c4 = c4_sweep(phi, &pairs, &cfg.scalar, t)?;

    let s5 = |z: &Point| -> Result<Option<f64>> { Ok(sqrt5_quantity(phi, z).ok()) };
    let s5_res = sup_search(phi.dim(), &s5, &cfg.component, phi.seed_directions(), None)?;
    let (sqrt5_sup, sqrt5_witness) = s5_res.map_or((0.0, None), |r| (r.value, Some(r.argmax)));

    let mut proxies = Vec::new();
    for &d in &cfg.proxy_deltas {
        proxies.push(compactness_proxy(phi, ProxyMode::Domain, d, &cfg.proxy)?);
    }
    for &d in &cfg.proxy_deltas {
        proxies.push(compactness_proxy(phi, ProxyMode::Range, d, &cfg.proxy)?);
    }
    proxies.push(compactness_proxy(phi, ProxyMode::WholeBall, 1.0, &cfg.proxy)?);

    let mut reasons = Vec::new();
    let necessary: Vec<&CriterionEstimate> = [&c1, &c2, &c3].into_iter().chain(c3p.iter()).chain(c4.iter()).collect();
    for e in &necessary {
        reasons.push(Reason {
            check: format!("{} {}", e.name.as_str(), e.label),
            role: Role::Necessary,
            outcome: trend_outcome(e),
            decisive: true,
            detail: describe(e),
        });
    }
    let bound = 5f64.sqrt();
    reasons.push(Reason {
        check: "sqrt5 bound".into(),
        role: Role::Necessary,
        outcome: if sqrt5_sup > bound + SQRT5_TOL { Outcome::Fail } else { Outcome::Pass },
        decisive: true,
        detail: format!("sup {:.6} against {:.6}", sqrt5_sup, bound),
    });
    for e in [&c1p, &c11, &b0] {
        reasons.push(Reason {
            check: format!("{} {}", e.name.as_str(), e.label),
            role: Role::Sufficient,
            outcome: trend_outcome(e),
            decisive: false,
            detail: describe(e),
        });
    }
    for p in &proxies {
        reasons.push(Reason {
            check: proxy_check(p),
            role: if p.mode == ProxyMode::Domain { Role::Necessary } else { Role::Sufficient },
            outcome: if p.consistent { Outcome::Pass } else { Outcome::Fail },
            decisive: false,
            detail: proxy_detail(p),
        });
    }

    let range_ok = |mode: ProxyMode| {
        let sel: Vec<&CompactnessProxy> = proxies.iter().filter(|p| p.mode == mode).collect();
        !sel.is_empty() && sel.iter().all(|p| p.consistent)
    };
    let mut paths = Vec::new();
    let mut path = |name: &str, conds: Vec<(&str, bool)>| {
        let missing: Vec<String> = conds.iter().filter(|c| !c.1).map(|c| c.0.to_string()).collect();
        paths.push(SufficientPath { name: name.into(), holds: missing.is_empty(), missing });
    };
    path(
        "sup norm below one with relatively compact range",
        vec![
            ("certified sup |phi| < 1", phi.sup_norm_bound().is_some_and(|b| b < 1.0)),
            ("whole-ball proxy", range_ok(ProxyMode::WholeBall)),
        ],
    );
    path(
        "range proxies with c1 and c2",
        vec![("range proxies", range_ok(ProxyMode::Range)), ("c1 to zero", passes(&c1)), ("c2 to zero", passes(&c2))],
    );
    path(
        "little Bloch symbol fixing the origin",
        vec![
            ("phi(0) = 0", phi.fixes_origin()),
            ("b0 membership", passes(&b0)),
            ("domain proxies", range_ok(ProxyMode::Domain)),
            ("c1' to zero", passes(&c1p)),
            ("c11 to zero", passes(&c11)),
        ],
    );

    let decisive_fail = reasons.iter().any(|r| r.decisive && r.role == Role::Necessary && r.outcome == Outcome::Fail);
    let verdict = if decisive_fail {
        Verdict::NoncompactNecessaryViolated
    } else if paths.iter().any(|p| p.holds) {
        Verdict::CompactSufficient
    } else {
        Verdict::Inconclusive
    };

    let mut estimates = vec![c1, c2, c1p, c11, b0, c3];
    estimates.extend(c3p);
    estimates.extend(c4);
    Ok(CompactnessVerdict {
        family: phi.family().to_string(),
        n: phi.dim(),
        verdict,
        reasons,
        paths,
        estimates,
        proxies,
        sqrt5_sup,
        sqrt5_witness,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{build_symbol, SymbolSpec};

    fn quick() -> ReportConfig {
        let mut cfg = ReportConfig::default();
        cfg.sweep.samples = 12;
        cfg.sweep.polish_evals = 200;
        cfg.component.samples = 12;
        cfg.component.polish_evals = 200;
        cfg.scalar.samples = 8;
        cfg.proxy.samples = 600;
        cfg.c4_random_pairs = 4;
        cfg
    }

    #[test]
    fn identity_is_noncompact() {
        let id = build_symbol(&SymbolSpec::Identity, 4).unwrap();
        let v = compactness_report(&id, &quick()).unwrap();
        assert_eq!(v.verdict, Verdict::NoncompactNecessaryViolated);
        assert_eq!(v.estimate(CriterionName::C2).unwrap().trend, Trend::BoundedAway);
        assert!(v.sqrt5_sup <= 5f64.sqrt() + SQRT5_TOL);
    }

    #[test]
    fn product_family_is_compact() {
        let p = build_symbol(&SymbolSpec::ProductCom1, 16).unwrap();
        let v = compactness_report(&p, &quick()).unwrap();
        assert_eq!(v.verdict, Verdict::CompactSufficient, "{:#?}", v.reasons);
        let c1 = v.estimate(CriterionName::C1).unwrap();
        assert!(c1.vacuous && c1.trend == Trend::ToZero);
    }

    #[test]
    fn power_family_is_noncompact() {
        let p = build_symbol(&SymbolSpec::Power, 6).unwrap();
        let v = compactness_report(&p, &quick()).unwrap();
        assert_eq!(v.verdict, Verdict::NoncompactNecessaryViolated);
        assert_eq!(v.estimate(CriterionName::C3).unwrap().trend, Trend::BoundedAway);
    }
}
