//! Command-line front end for the `lrbounds` library.
//!
//! Subcommands print one-line JSON (`bound`) or CSV (`verify`, `compare`,
//! `rate`). Exit codes: 0 success, 2 usage error, 3 a bound failed to
//! dominate its oracle, 4 numeric failure.

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lrbounds::lr_bounds::{Direction, Optimizer};
use lrbounds::Error;

pub mod commands;
pub mod engine;
pub mod input;
pub mod table;

use engine::{BoundOptions, OracleChoice};
use input::{parse_json, Sweep};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMINATION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Worker count used for Monte-Carlo sharding unless `--workers` is given.
/// Fixed rather than tied to the host so results are reproducible.
pub const DEFAULT_WORKERS: usize = 4;

const MIN_MC_SAMPLES: u64 = 1000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Domination(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domination(_) => EXIT_DOMINATION,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidPoint(_)
            | Error::InvalidParams(_)
            | Error::Unsupported(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Numeric(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Numeric(format!("csv error: {e}"))
    }
}

#[derive(Parser)]
#[command(name = "lr-bounds", version, about = "Likelihood-ratio concentration bounds and their oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound for one threshold, as one line of JSON.
    Bound(BoundArgs),
    /// Check bounds against oracles over a sweep file, as CSV.
    Verify(VerifyArgs),
    /// Classical baselines next to the likelihood-ratio bounds, as CSV.
    Compare(CompareArgs),
    /// Rate-function gaps against exact tails, as CSV.
    Rate(RateArgs),
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    family: String,
    /// Family parameters as a JSON object.
    #[arg(long, default_value = "{}")]
    params: String,
    /// Threshold as JSON: a number, an array, or an array of matrix rows.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long, default_value_t = 1)]
    n: u64,
    #[arg(long, default_value = "upper")]
    dir: Direction,
    #[arg(long, default_value = "mom")]
    method: Optimizer,
    #[arg(long)]
    sharpen: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Exact,
    Mc,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    family: String,
    /// JSON sweep file.
    #[arg(long)]
    sweep: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    oracle: OracleArg,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, env = "LR_BOUNDS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WORKERS)]
    workers: usize,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value = "{}")]
    params: String,
    /// JSON array of thresholds.
    #[arg(long)]
    z_grid: String,
    #[arg(long, default_value_t = 1)]
    n: u64,
    #[arg(long, default_value = "upper")]
    dir: Direction,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value = "{}")]
    params: String,
    #[arg(long)]
    z: f64,
    /// JSON array of sample sizes.
    #[arg(long)]
    n_list: String,
}

fn bound(a: BoundArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = parse_json("--params", &a.params)?;
    let z = parse_json("--z", &a.z)?;
    let opts = BoundOptions {
        method: a.method,
        sharpen: a.sharpen,
    };
    let line = commands::bound_json(&a.family, &params, &z, a.n, a.dir, &opts)?;
    writeln!(out, "{line}")?;
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.sweep)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.sweep.display())))?;
    let sweep = Sweep::parse(&text)?;
    let choice = match a.oracle {
        OracleArg::Exact => OracleChoice::Exact,
        OracleArg::Mc => {
            if a.workers == 0 {
                return Err(CliError::Usage("--workers must be positive".into()));
            }
            if a.samples < MIN_MC_SAMPLES {
                return Err(CliError::Usage(format!("--samples must be at least {MIN_MC_SAMPLES}")));
            }
            OracleChoice::MonteCarlo {
                samples: a.samples,
                seed: a.seed,
                workers: a.workers,
            }
        }
    };
    let outcome = commands::verify_sweep(&a.family, &sweep, choice)?;
    outcome.write_csv(out)?;
    for (case, msg) in &outcome.errors {
        writeln!(err, "error: {case}: {msg}")?;
    }
    let bad = outcome.violations();
    if bad > 0 {
        return Err(CliError::Domination(format!(
            "{bad} of {} cases not dominated",
            outcome.rows.len()
        )));
    }
    if !outcome.errors.is_empty() {
        return Err(CliError::Numeric(format!("{} cases failed to evaluate", outcome.errors.len())));
    }
    Ok(())
}

fn compare(a: CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = parse_json("--params", &a.params)?;
    let grid: Vec<f64> = serde_json::from_str(&a.z_grid)
        .map_err(|e| CliError::Usage(format!("--z-grid must be a JSON array of numbers: {e}")))?;
    commands::compare_csv(&a.family, &params, &grid, a.n, a.dir, out)
}

fn rate(a: RateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = parse_json("--params", &a.params)?;
    let n_list: Vec<u64> = serde_json::from_str(&a.n_list)
        .map_err(|e| CliError::Usage(format!("--n-list must be a JSON array of integers: {e}")))?;
    let points = commands::rate_points(&a.family, &params, a.z, &n_list)?;
    commands::rate_csv(&points, out)
}

/// Runs one command; `args` excludes the program name. Returns the exit
/// code, with results on `out` and diagnostics on `err`.
pub fn run_cli(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = std::iter::once("lr-bounds".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Bound(a) => bound(a, out),
        Command::Verify(a) => verify(a, out, err),
        Command::Compare(a) => compare(a, out),
        Command::Rate(a) => rate(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
