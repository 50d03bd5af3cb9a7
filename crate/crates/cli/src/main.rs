//! `g2ambient`: batch driver that reads a run configuration, executes one
//! pipeline and writes a structured report.
//!
//! Exit codes: 0 when every verdict passes, 1 when a check fails, 2 for
//! invalid input (unreadable or inconsistent configuration, malformed
//! polynomials, a non-parallel tractor seed, insufficient truncation).

mod commands;
mod config;
mod inputs;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use g2ambient_core::Q;

use config::{Mode, Overrides, RawConfig, RunConfig};
use report::{render, run_table, Failure};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] g2ambient_core::Error),
    #[error("{message}")]
    NotParallel { message: String, residual: Vec<String> },
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn failure(&self) -> Failure {
        let kind = match self {
            CliError::Config(_) => "config".to_string(),
            CliError::Core(e) => core_kind(e).to_string(),
            CliError::NotParallel { .. } => "not-parallel".to_string(),
            CliError::Io(_) => "io".to_string(),
        };
        let diagnostic = match self {
            CliError::NotParallel { residual, .. } => residual.clone(),
            _ => Vec::new(),
        };
        Failure { kind, message: self.to_string(), diagnostic }
    }
}

fn core_kind(e: &g2ambient_core::Error) -> &'static str {
    use g2ambient_core::Error::*;
    match e {
        ShapeMismatch(_) => "shape-mismatch",
        NotInvertible(_) => "not-invertible",
        InvalidRecentering(_) => "invalid-recentering",
        InsufficientOrder(_) => "insufficient-order",
        DegenerateMetric(_) => "degenerate-metric",
        Dimension(_) => "dimension",
        AmbiguityNotDetermined(_) => "ambiguity-not-determined",
        SingularSystem { .. } => "singular-system",
        NotParallel(_) => "not-parallel",
        NotEinstein(_) => "not-einstein",
        NotAdapted(_) => "not-adapted",
        Inexact(_) => "inexact",
        ScaleMismatch(_) => "scale-mismatch",
        InvalidInput(_) => "invalid-input",
    }
}

#[derive(Debug, Parser)]
#[command(name = "g2ambient", version, about = "Ambient metric, tractor and G2 checks on truncated jets")]
struct Args {
    /// Run configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Command to run: fg-expand, extend-tractor, check-2plane, fhol, check-pe, check-cr.
    #[arg(long, value_name = "NAME")]
    command: Option<String>,
    /// Jet order in the base coordinates.
    #[arg(long, value_name = "K")]
    order: Option<u32>,
    /// Depth of the expansion in rho.
    #[arg(long = "rho-order", value_name = "K")]
    rho_order: Option<u32>,
    /// Scalar arithmetic: exact rationals or floats.
    #[arg(long, value_name = "exact|float")]
    mode: Option<String>,
    /// Zero threshold in float mode.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Add wall-clock timing to the report.
    #[arg(long)]
    timing: bool,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let raw = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    let ov = Overrides {
        command: args.command.clone(),
        x_order: args.order,
        rho_order: args.rho_order,
        mode: args.mode.clone(),
        tolerance: args.tol,
    };
    RunConfig::resolve(raw, &ov)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let start = Instant::now();
    let cfg = load(&args);
    let result = match &cfg {
        Ok(c) => match c.mode {
            Mode::Exact => commands::run::<Q>(c),
            Mode::Float => commands::run::<f64>(c),
        },
        Err(e) => Err(CliError::Config(match e {
            CliError::Config(m) => m.clone(),
            other => other.to_string(),
        })),
    };
    let failure = result.as_ref().err().map(CliError::failure);
    let run = run_table(cfg.as_ref().ok(), args.command.as_deref());
    let elapsed = args.timing.then(|| start.elapsed().as_secs_f64() * 1000.0);
    let (text, status) = match (&result, &failure) {
        (Ok(o), _) => render(run, Ok(o), elapsed),
        (Err(_), Some(f)) => render(run, Err(f), elapsed),
        (Err(_), None) => unreachable!(),
    };
    if let Err(e) = &result {
        eprintln!("g2ambient: {e}");
    }
    match &args.report {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("g2ambient: cannot write report {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(status.code() as u8)
}
