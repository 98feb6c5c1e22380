//! Run configuration: JSON parsing, defaults and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use blochball_core::diagnostics::ReportConfig;
use blochball_core::{build_symbol, SearchBudget, SymbolSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::suites::{check_ids, CHECKS};

pub const DEFAULT_DIMENSION: usize = 16;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Boundedness,
    Examples,
    Gradients,
    Metrics,
    Mobius,
    Necessity,
    SchwarzPick,
    Seminorms,
    Sufficiency,
}

impl Suite {
    /// Every suite, ordered by name.
    pub const ALL: [Suite; 9] = [
        Suite::Boundedness,
        Suite::Examples,
        Suite::Gradients,
        Suite::Metrics,
        Suite::Mobius,
        Suite::Necessity,
        Suite::SchwarzPick,
        Suite::Seminorms,
        Suite::Sufficiency,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Boundedness => "boundedness",
            Suite::Examples => "examples",
            Suite::Gradients => "gradients",
            Suite::Metrics => "metrics",
            Suite::Mobius => "mobius",
            Suite::Necessity => "necessity",
            Suite::SchwarzPick => "schwarz_pick",
            Suite::Seminorms => "seminorms",
            Suite::Sufficiency => "sufficiency",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownSuite { name: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub dimension: usize,
    pub seed: u64,
    pub suites: Vec<Suite>,
    /// Extra symbols exercised next to the built-in families.
    pub symbols: Vec<SymbolSpec>,
    /// Random instances per cheap check; expensive checks use a tenth.
    pub samples: usize,
    pub quadrature_nodes: usize,
    pub budgets: BTreeMap<Suite, SearchBudget>,
    /// Per-check tolerance overrides, keyed by check id.
    pub tolerances: BTreeMap<String, f64>,
    pub diagnostics: ReportConfig,
    pub output: OutputConfig,
    /// Adds wall-clock times to reports (which makes them non-reproducible).
    pub include_timing: bool,
    /// Appends a check that always fails, for exercising the exit-code contract.
    pub inject_failure: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dimension: DEFAULT_DIMENSION,
            seed: DEFAULT_SEED,
            suites: Suite::ALL.to_vec(),
            symbols: Vec::new(),
            samples: DEFAULT_SAMPLES,
            quadrature_nodes: DEFAULT_NODES,
            budgets: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            diagnostics: ReportConfig::default(),
            output: OutputConfig::default(),
            include_timing: false,
            inject_failure: false,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dimension: Option<usize>,
    seed: Option<u64>,
    suites: Option<Vec<String>>,
    #[serde(default)]
    symbols: Vec<SymbolSpec>,
    samples: Option<usize>,
    quadrature_nodes: Option<usize>,
    #[serde(default)]
    budgets: BTreeMap<String, SearchBudget>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    diagnostics: Option<ReportConfig>,
    #[serde(default)]
    output: OutputConfig,
    #[serde(default)]
    include_timing: bool,
    #[serde(default)]
    inject_failure: bool,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config is not valid UTF-8: {0}")]
    Utf8(#[from] std::str::Utf8Error),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown suite `{name}` (known: {})", Suite::ALL.map(|s| s.as_str()).join(", "))]
    UnknownSuite { name: String },
    #[error("unknown check id `{0}` in tolerances")]
    UnknownCheck(String),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), reason: reason.into() }
}

/// Parses a JSON config and fills defaults (n = 16, seed = 42, 64 quadrature nodes).
pub fn parse_config(text: &[u8]) -> Result<RunConfig, ConfigError> {
    let text = std::str::from_utf8(text)?;
    let raw: RawConfig = if text.trim().is_empty() { RawConfig::default() } else { serde_json::from_str(text)? };
    let d = RunConfig::default();
    let suites = match raw.suites {
        None => d.suites,
        Some(names) => {
            let mut out = Vec::new();
            for name in &names {
                let s: Suite = name.parse()?;
                if !out.contains(&s) {
                    out.push(s);
                }
            }
            out
        }
    };
    let mut budgets = BTreeMap::new();
    for (name, b) in raw.budgets {
        let s: Suite = name.parse()?;
        if b.samples == 0 {
            return Err(invalid(format!("budgets.{name}.samples"), "must be at least 1"));
        }
        budgets.insert(s, b);
    }
    let known = check_ids();
    for (id, tol) in &raw.tolerances {
        if !known.contains(&id.as_str()) {
            return Err(ConfigError::UnknownCheck(id.clone()));
        }
        if !tol.is_finite() {
            return Err(invalid(format!("tolerances.{id}"), "must be finite"));
        }
    }
    let cfg = RunConfig {
        dimension: raw.dimension.unwrap_or(d.dimension),
        seed: raw.seed.unwrap_or(d.seed),
        suites,
        symbols: raw.symbols,
        samples: raw.samples.unwrap_or(d.samples),
        quadrature_nodes: raw.quadrature_nodes.unwrap_or(d.quadrature_nodes),
        budgets,
        tolerances: raw.tolerances,
        diagnostics: raw.diagnostics.unwrap_or(d.diagnostics),
        output: raw.output,
        include_timing: raw.include_timing,
        inject_failure: raw.inject_failure,
    };
    validate(&cfg)?;
    Ok(cfg)
}

pub fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    if cfg.dimension == 0 || cfg.dimension > 4096 {
        return Err(invalid("dimension", format!("{} outside 1..=4096", cfg.dimension)));
    }
    if cfg.samples == 0 {
        return Err(invalid("samples", "must be at least 1"));
    }
    if cfg.quadrature_nodes < 8 {
        return Err(invalid("quadrature_nodes", format!("{} < 8", cfg.quadrature_nodes)));
    }
    for (i, spec) in cfg.symbols.iter().enumerate() {
        build_symbol(spec, cfg.dimension).map_err(|e| invalid(format!("symbols[{i}]"), e.to_string()))?;
    }
    let b = &cfg.diagnostics;
    for (name, budget) in [("sweep", &b.sweep), ("component", &b.component), ("scalar", &b.scalar)] {
        if budget.samples == 0 {
            return Err(invalid(format!("diagnostics.{name}.samples"), "must be at least 1"));
        }
    }
    if b.proxy_deltas.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
        return Err(invalid("diagnostics.proxy_deltas", "every delta must lie in (0, 1)"));
    }
    Ok(())
}

impl RunConfig {
    pub fn tolerance(&self, id: &str, default: f64) -> f64 {
        self.tolerances.get(id).copied().unwrap_or(default)
    }

    pub fn budget(&self, suite: Suite) -> SearchBudget {
        self.budgets.get(&suite).copied().unwrap_or_default()
    }

    /// Anchor text of a registered check.
    pub fn anchor(id: &str) -> Option<&'static str> {
        CHECKS.iter().find(|c| c.id == id).map(|c| c.anchor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let cfg = parse_config(b"{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!((cfg.dimension, cfg.seed, cfg.quadrature_nodes), (16, 42, 64));
        assert_eq!(cfg.suites.len(), 9);
    }

    #[test]
    fn dimension_and_one_suite() {
        let cfg = parse_config(br#"{"dimension": 4, "suites": ["schwarz_pick"]}"#).unwrap();
        assert_eq!(cfg.dimension, 4);
        assert_eq!(cfg.suites, vec![Suite::SchwarzPick]);
    }

    #[test]
    fn unknown_suite_is_named() {
        let err = parse_config(br#"{"suites": ["nonexistent"]}"#).unwrap_err();
        assert!(err.to_string().contains("nonexistent"), "{err}");
        let err = parse_config(br#"{"budgets": {"nope": {}}}"#).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownSuite { .. }));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_config(b"{\n  \"dimension\": \"four\"\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_config(br#"{"dimensoin": 4}"#).unwrap_err();
        assert!(err.to_string().contains("dimensoin"), "{err}");
    }

    #[test]
    fn validation() {
        assert!(parse_config(br#"{"dimension": 0}"#).is_err());
        assert!(parse_config(br#"{"quadrature_nodes": 4}"#).is_err());
        assert!(matches!(parse_config(br#"{"tolerances": {"no.such.check": 1.0}}"#), Err(ConfigError::UnknownCheck(_))));
        let ok = parse_config(br#"{"tolerances": {"mobius.involution": 1e-6}}"#).unwrap();
        assert_eq!(ok.tolerance("mobius.involution", 1e-9), 1e-6);
        let err = parse_config(br#"{"dimension": 2, "symbols": [{"family": "constant", "c": [[2.0, 0.0]]}]}"#).unwrap_err();
        assert!(err.to_string().contains("symbols[0]"), "{err}");
    }

    #[test]
    fn symbols_and_budgets() {
        let cfg = parse_config(
            br#"{"symbols": [{"family": "power"}, {"family": "block_power", "variant": "psi"}],
                "budgets": {"seminorms": {"samples": 8, "depth": 10}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.symbols.len(), 2);
        let b = cfg.budget(Suite::Seminorms);
        assert_eq!((b.samples, b.depth), (8, 10));
        assert_eq!(cfg.budget(Suite::Mobius), SearchBudget::default());
    }
}
