use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use blochball_cli::config::{validate, DEFAULT_DIMENSION};
use blochball_cli::report::{companion_csvs, sweep_csv, write_file};
use blochball_cli::{emit_report, exit_code, init_threads, parse_config, parse_symbol_file, run_suites, Format, Suite, SweepRecord};
use blochball_core::diagnostics::{boundary_sweep, compactness_report, Quantity, ReportConfig, SweepMode};
use blochball_core::{build_symbol, SymbolMap};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "blochball", version, about = "Verification suites and compactness diagnostics on the Hilbert ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Restrict to these suites (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Report path; sweep CSVs are written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Print the compactness verdict of a symbol as JSON.
    Diagnose {
        #[arg(long)]
        symbol: PathBuf,
        /// Random directions per radius in the boundary sweeps.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Write one boundary sweep as CSV.
    Sweep {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, value_enum)]
        quantity: QuantityArg,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Q1,
    Q2,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Phi,
    Z,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_symbol(path: &Path) -> Result<(String, SymbolMap)> {
    let file = parse_symbol_file(&read(path)?).with_context(|| format!("invalid symbol file {}", path.display()))?;
    let n = file.n.unwrap_or(DEFAULT_DIMENSION);
    let map = build_symbol(&file.spec, n).with_context(|| format!("cannot build symbol from {}", path.display()))?;
    Ok((file.spec.name().to_string(), map))
}

fn verify(
    config: &Path,
    suites: &[String],
    format: Option<Format>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    dim: Option<usize>,
) -> Result<i32> {
    let mut cfg = parse_config(&read(config)?).with_context(|| format!("in {}", config.display()))?;
    if !suites.is_empty() {
        cfg.suites = suites.iter().map(|s| s.parse::<Suite>()).collect::<Result<_, _>>()?;
    }
    if let Some(f) = format {
        cfg.output.format = f;
    }
    if let Some(p) = out {
        cfg.output.path = Some(p);
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = dim {
        cfg.dimension = n;
    }
    validate(&cfg)?;
    let reports = run_suites(&cfg);
    let bytes = emit_report(&reports, cfg.output.format)?;
    match &cfg.output.path {
        Some(path) => {
            write_file(path, &bytes)?;
            let dir = path.parent().unwrap_or(Path::new("."));
            for (name, body) in companion_csvs(&reports)? {
                write_file(&dir.join(name), &body)?;
            }
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).context("cannot write to stdout")?;
        }
    }
    Ok(exit_code(&reports))
}

fn diagnose(symbol: &Path, budget: Option<usize>) -> Result<i32> {
    let (_, phi) = load_symbol(symbol)?;
    let mut cfg = ReportConfig::default();
    if let Some(b) = budget {
        if b == 0 {
            bail!("--budget must be at least 1");
        }
        cfg.sweep.samples = b;
        cfg.component.samples = b;
        cfg.scalar.samples = b;
    }
    let verdict = compactness_report(&phi, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&verdict)?);
    Ok(0)
}

fn sweep(symbol: &Path, quantity: QuantityArg, mode: ModeArg, out: &Path) -> Result<i32> {
    let (name, phi) = load_symbol(symbol)?;
    let q = match quantity {
        QuantityArg::Q1 => Quantity::Q1,
        QuantityArg::Q2 => Quantity::Q2,
    };
    let m = match mode {
        ModeArg::Phi => SweepMode::Phi,
        ModeArg::Z => SweepMode::Z,
    };
    let cfg = ReportConfig::default();
    let est = boundary_sweep(&phi, q, m, &cfg.sweep, &cfg.trend)?;
    write_file(out, &sweep_csv(&SweepRecord::from_estimate(&name, &est))?)?;
    let trend = serde_json::to_value(est.trend)?;
    println!("{name} {}: trend {} limit {:.6}", est.label, trend.as_str().unwrap_or("?"), est.limit_estimate);
    Ok(0)
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { config, suites, format, out, seed, dim } => verify(&config, &suites, format, out, seed, dim),
        Command::Diagnose { symbol, budget } => diagnose(&symbol, budget),
        Command::Sweep { symbol, quantity, mode, out } => sweep(&symbol, quantity, mode, &out),
    };
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
