//! `entangle` — experiment runner for the entanglement toolkit.
//!
//! Reproduces the reference tables and figure datasets as CSV/JSON, and runs
//! ad-hoc classification, Schmidt decomposition, MPS decomposition and
//! cloning simulations on user-supplied states.
//!
//! Exit codes: 0 success, 2 usage, 3 bad parameters, 4 numerical failure.

mod experiments;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Param(String),
    Numerical(String),
}

impl From<entangle_core::Error> for CliError {
    fn from(e: entangle_core::Error) -> Self {
        match e {
            entangle_core::Error::InvalidArgument(m) | entangle_core::Error::InvalidInput(m) => {
                CliError::Param(m)
            }
            entangle_core::Error::Numerical(m) => CliError::Numerical(m),
            entangle_core::Error::AmbiguousRank { ratio } => CliError::Numerical(format!(
                "ambiguous rank at tolerance boundary (ratio {ratio:.3e})"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Experiment runner reproducing the toolkit's quantitative tables at desk
/// scale.
#[derive(Parser, Debug)]
#[command(name = "entangle", version, about, after_help = format!(
    "Registered experiments:\n  {}",
    experiments::EXPERIMENTS.join(", ")
))]
struct Cli {
    /// Experiment to run (see the list below).
    experiment: String,
    /// JSON file with experiment parameters ({"key": value, ...}).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Seed for the experiments that sample (classification robustness).
    #[arg(long, default_value = "0")]
    seed: u64,
    /// Worker threads for the data-parallel kernels (0 = rayon default).
    #[arg(long, default_value = "0")]
    threads: usize,
    /// Parameter overrides, repeatable; values parse as JSON.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Input state JSON ({"dims": [...], "amps": [[re, im], ...]}).
    #[arg(long)]
    state: Option<PathBuf>,
    /// Bipartition block for `schmidt`, comma-separated subsystem indices.
    #[arg(long)]
    cut: Option<String>,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        entangle_core::par::configure_threads(cli.threads)
            .map_err(CliError::Param)?;
    }
    let params = params::Params::load(cli.config.as_deref(), &cli.set)?;
    let ctx = experiments::Context {
        params,
        state_path: cli.state.as_deref(),
        cut: cli.cut.as_deref(),
        seed: cli.seed,
    };
    let output = experiments::run(&cli.experiment, &ctx)?;
    output.write(cli.out.as_deref(), cli.format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Param(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}
