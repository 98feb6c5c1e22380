//! Batch front-end for the ball geometry and composition-operator library:
//! configuration, verification suites, and report serialization.

pub mod check;
pub mod config;
pub mod report;
pub mod suites;

use blochball_core::SymbolSpec;
use serde::Deserialize;

pub use check::{CheckRecord, Status, SuiteReport, SweepRecord};
pub use config::{parse_config, ConfigError, Format, RunConfig, Suite};
pub use report::{companion_csvs, emit_report, Document, Summary};
pub use suites::{exit_code, run_suite, run_suites};

/// A symbol file: a `SymbolSpec` plus an optional dimension, e.g.
/// `{"family": "power", "n": 16}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SymbolFile {
    #[serde(flatten)]
    pub spec: SymbolSpec,
    #[serde(default)]
    pub n: Option<usize>,
}

pub fn parse_symbol_file(bytes: &[u8]) -> Result<SymbolFile, serde_json::Error> {
    serde_json::from_slice(bytes)
}

/// Caps the global worker pool at `BLOCHBALL_THREADS` when set.
pub fn init_threads() {
    if let Some(k) = std::env::var("BLOCHBALL_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_files() {
        let f = parse_symbol_file(br#"{"family": "power", "n": 16}"#).unwrap();
        assert_eq!(f.spec, SymbolSpec::Power);
        assert_eq!(f.n, Some(16));
        let f = parse_symbol_file(br#"{"family": "block_power", "variant": "psi"}"#).unwrap();
        assert_eq!(f.n, None);
        assert!(parse_symbol_file(br#"{"family": "nope"}"#).is_err());
    }
}
