//! `persivol`: batch experiments for persistent intrinsic volume estimation.
//!
//! Exit codes: 0 success, 1 check failure, 2 configuration error, 3 internal error.

mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use persivol::Error;

#[derive(Parser)]
#[command(
    name = "persivol",
    version,
    about = "Persistent intrinsic volumes of noisy point samples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the intrinsic volumes of one noisy sample.
    Estimate(EstimateArgs),
    /// Repeat the estimate over several noise levels and fit the convergence rate.
    Sweep(SweepArgs),
    /// Compare the image-persistence reduction with the rank oracle on random complexes.
    OracleCheck(OracleArgs),
    /// Exact intrinsic volumes and Steiner values of a convex shape.
    Baseline(BaselineArgs),
}

/// Settings shared by `estimate` and `sweep`; flags override the config file.
#[derive(Args)]
pub struct Overrides {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub grid_spacing: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Number of points drawn from the shape.
    #[arg(long)]
    pub sample_size: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: Overrides,
    #[arg(long)]
    pub out: PathBuf,
    /// Optional per-sample CSV trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Overrides,
    /// Comma-separated noise levels, e.g. `0.04,0.02,0.01`.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, default_value_t = 100)]
    pub max_cells: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
}

#[derive(Args)]
pub struct BaselineArgs {
    /// ball, box or segment.
    #[arg(long)]
    pub shape: String,
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Box side lengths, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub sides: Option<Vec<f64>>,
    #[arg(long)]
    pub length: Option<f64>,
    /// Offset radius `t`: report `V_i(X^t)`.
    #[arg(long, default_value_t = 0.0)]
    pub offset: f64,
    /// Radii at which to report `Q_{X^t}(r) = Vol(X^{t+r})`.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    pub r: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Command failure with its exit code.
pub enum Failure {
    Check(String),
    Config(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_configuration() {
            Failure::Config(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(a) => commands::estimate(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::OracleCheck(a) => commands::oracle_check(&a),
        Command::Baseline(a) => commands::baseline(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
