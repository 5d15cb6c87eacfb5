//! Scenario-driven command line front end.
//!
//! Exit codes: 0 on success, 1 for invalid input (including I/O problems),
//! 2 when a numerical procedure fails.

mod output;
mod report;
mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use output::{fmt_f64, write_artifacts, Artifact, Format, Table};
pub use report::{analyse, coefficients_report, Analysis, CoefficientsReport, DampingReport, Outcome};
pub use scenario::{OracleConfig, Scenario, ScenarioFile, OBSERVABLE_ORDER};

use crate::error::Error;

/// Environment variable overriding the default output directory.
pub const OUT_ENV: &str = "SBSTOCH_OUT";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("ParseError: {path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("ValidationError({field}): {reason}")]
    Validation { field: String, reason: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Numerical(Error),
}

impl CliError {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation { field: field.into(), reason: reason.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { name, reason } => CliError::validation(name, reason),
            e @ Error::DimensionBudgetExceeded { .. } => CliError::validation("oracle", e.to_string()),
            e => CliError::Numerical(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sbstoch", version, about = "Weak-coupling limit dynamics of the spin-boson model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    /// Limit coefficients, regime and provenance (coefficients.json)
    Coeffs,
    /// Time series of the requested observables (series.csv, plot.gp)
    Evolve,
    /// Trace of the correlator by both routes (correlator.csv)
    Correlator,
    /// Classify the dynamical regime (regime.json)
    Regime,
    /// Solve for the amplitude at which the oscillation stops (damping.json)
    SolveDamping,
    /// Exact discretized-bath comparison (oracle/*.csv)
    Oracle,
    /// Everything the scenario asks for
    Run,
}

#[derive(Debug, clap::Args)]
struct Args {
    /// Scenario file (TOML)
    scenario: PathBuf,
    /// Output directory
    #[arg(long, env = OUT_ENV, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Limit coefficients, regime and provenance (coefficients.json)
    Coeffs(Args),
    /// Time series of the requested observables (series.csv, plot.gp)
    Evolve(Args),
    /// Trace of the correlator by both routes (correlator.csv)
    Correlator(Args),
    /// Classify the dynamical regime (regime.json)
    Regime(Args),
    /// Solve for the amplitude at which the oscillation stops (damping.json)
    SolveDamping(Args),
    /// Exact discretized-bath comparison (oracle/*.csv)
    Oracle(Args),
    /// Everything the scenario asks for
    Run(Args),
}

impl Command {
    fn split(self) -> (CommandKind, Args) {
        match self {
            Command::Coeffs(a) => (CommandKind::Coeffs, a),
            Command::Evolve(a) => (CommandKind::Evolve, a),
            Command::Correlator(a) => (CommandKind::Correlator, a),
            Command::Regime(a) => (CommandKind::Regime, a),
            Command::SolveDamping(a) => (CommandKind::SolveDamping, a),
            Command::Oracle(a) => (CommandKind::Oracle, a),
            Command::Run(a) => (CommandKind::Run, a),
        }
    }
}

/// Runs one subcommand on a loaded scenario without touching the disk.
pub fn execute(kind: CommandKind, s: &Scenario, format: Format) -> Result<Outcome, CliError> {
    match kind {
        CommandKind::Coeffs => report::coeffs(s),
        CommandKind::Evolve => report::evolve(s, format),
        CommandKind::Correlator => report::correlator(s, format),
        CommandKind::Regime => report::regime(s),
        CommandKind::SolveDamping => report::damping(s),
        CommandKind::Oracle => report::oracle(s, format),
        CommandKind::Run => report::run_all(s, format),
    }
}

/// Loads the scenario, runs the subcommand and writes its artifacts.
pub fn run_to_dir(kind: CommandKind, scenario: &Path, out: &Path, format: Format) -> Result<Outcome, CliError> {
    let s = Scenario::load(scenario)?;
    let outcome = execute(kind, &s, format)?;
    write_artifacts(out, &outcome.artifacts)?;
    Ok(outcome)
}

pub fn main() -> i32 {
    main_from(std::env::args_os())
}

pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (kind, args) = cli.command.split();
    match run_to_dir(kind, &args.scenario, &args.out, args.format) {
        Ok(outcome) => {
            let _ = std::io::stdout().write_all(outcome.summary.as_bytes());
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
