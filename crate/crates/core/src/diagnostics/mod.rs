//! Compactness diagnostics for composition operators.
//!
//! Limits are estimated from geometric bin sweeps `[1 - 2^-j, 1 - 2^-(j+1))`
//! and reported as a three-valued trend.

mod pointwise;
mod proxy;
mod sweep;
mod verdict;

use serde::{Deserialize, Serialize};

pub use pointwise::*;
pub use proxy::*;
pub use sweep::*;
pub use verdict::*;

use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionName {
    C0Proxy,
    C1,
    C2,
    C1Prime,
    C11,
    C3,
    C3Prime,
    C4,
    B0Membership,
}

impl CriterionName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::C0Proxy => "c0_proxy",
            Self::C1 => "c1",
            Self::C2 => "c2",
            Self::C1Prime => "c1_prime",
            Self::C11 => "c11",
            Self::C3 => "c3",
            Self::C3Prime => "c3_prime",
            Self::C4 => "c4",
            Self::B0Membership => "b0_membership",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    ToZero,
    BoundedAway,
    Inconclusive,
}

/// Decision thresholds applied to the last two bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrendConfig {
    pub zero_tol: f64,
    pub away_tol: f64,
}

impl Default for TrendConfig {
    fn default() -> Self {
        Self { zero_tol: 0.02, away_tol: 0.2 }
    }
}

/// Sup estimate over one bin. `sup` is `None` for bins without samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinEstimate {
    pub low: f64,
    pub high: f64,
    pub sup: Option<f64>,
    pub witness: Option<Point>,
    pub witness_norm: Option<f64>,
    pub witness_phi_norm: Option<f64>,
    pub samples: usize,
}

impl BinEstimate {
    pub fn empty(low: f64, high: f64) -> Self {
        Self { low, high, sup: None, witness: None, witness_norm: None, witness_phi_norm: None, samples: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionEstimate {
    pub name: CriterionName,
    /// Free-form qualifier, e.g. the component index.
    pub label: String,
    pub per_bin: Vec<BinEstimate>,
    pub trend: Trend,
    /// Set when the top bins are unreachable (no samples, or certified empty).
    pub vacuous: bool,
    /// Largest sup over the last two bins.
    pub limit_estimate: f64,
    /// Witness of the highest non-empty bin.
    pub witness: Option<Point>,
    pub empty_bins: Vec<usize>,
}

impl CriterionEstimate {
    pub fn from_bins(name: CriterionName, label: impl Into<String>, per_bin: Vec<BinEstimate>, cfg: &TrendConfig) -> Self {
        let (trend, vacuous, limit_estimate) = fit_trend(&per_bin, cfg);
        let witness = per_bin.iter().rev().find_map(|b| b.witness.clone());
        let empty_bins = per_bin.iter().enumerate().filter(|(_, b)| b.sup.is_none()).map(|(i, _)| i).collect();
        Self { name, label: label.into(), per_bin, trend, vacuous, limit_estimate, witness, empty_bins }
    }

    /// Marks the estimate vacuous because the range provably misses the top bins.
    pub fn certified_vacuous(name: CriterionName, label: impl Into<String>, per_bin: Vec<BinEstimate>) -> Self {
        let mut e = Self::from_bins(name, label, per_bin, &TrendConfig::default());
        e.trend = Trend::ToZero;
        e.vacuous = true;
        e
    }
}

/// Trend from the last two bins: both below `zero_tol` gives `ToZero`, both
/// above `away_tol` gives `BoundedAway`. Empty bins count as 0; when both are
/// empty the result is a vacuous `ToZero`.
pub fn fit_trend(bins: &[BinEstimate], cfg: &TrendConfig) -> (Trend, bool, f64) {
    let tail: Vec<Option<f64>> = bins.iter().rev().take(2).map(|b| b.sup).collect();
    if tail.iter().all(Option::is_none) {
        return (Trend::ToZero, true, 0.0);
    }
    let vals: Vec<f64> = tail.iter().map(|v| v.unwrap_or(0.0)).collect();
    let limit = vals.iter().cloned().fold(0.0, f64::max);
    let trend = if vals.iter().all(|&v| v < cfg.zero_tol) {
        Trend::ToZero
    } else if vals.len() == 2 && vals.iter().all(|&v| v > cfg.away_tol) {
        Trend::BoundedAway
    } else {
        Trend::Inconclusive
    };
    (trend, false, limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(sup: Option<f64>) -> BinEstimate {
        BinEstimate { sup, ..BinEstimate::empty(0.0, 0.5) }
    }

    #[test]
    fn trend_rules() {
        let cfg = TrendConfig::default();
        assert_eq!(fit_trend(&[bin(Some(0.9)), bin(Some(0.01)), bin(Some(0.005))], &cfg), (Trend::ToZero, false, 0.01));
        assert_eq!(fit_trend(&[bin(Some(0.3)), bin(Some(0.25))], &cfg).0, Trend::BoundedAway);
        assert_eq!(fit_trend(&[bin(Some(0.3)), bin(Some(0.1))], &cfg).0, Trend::Inconclusive);
        assert_eq!(fit_trend(&[bin(Some(0.3)), bin(None), bin(None)], &cfg), (Trend::ToZero, true, 0.0));
        assert_eq!(fit_trend(&[bin(Some(0.5)), bin(None)], &cfg).0, Trend::Inconclusive);
        assert_eq!(fit_trend(&[], &cfg), (Trend::ToZero, true, 0.0));
    }
}
