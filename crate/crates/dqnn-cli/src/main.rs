//! Command-line driver: dataset generation, training, evaluation, gradient
//! checking, and uncertainty reports for the dissipative quantum neural
//! network simulator.
//!
//! Exit codes: 0 on success, 1 on runtime or numeric failure, 2 on usage or
//! file-format errors.

mod commands;
mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    /// Bad flags, malformed files, invalid configuration. Exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Failures during computation or output. Exit code 1.
    #[error("{0}")]
    Runtime(String),
}

#[derive(Parser)]
#[command(
    name = "dqnn",
    version,
    about = "Simulator and trainer for a small dissipative quantum neural network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset file.
    Gen(GenArgs),
    /// Train a fresh network on a dataset; writes a model and a round log.
    Train(TrainArgs),
    /// Evaluate a model: per-pair measurement statistics and the
    /// input/output interchange test.
    Eval(EvalArgs),
    /// Compare the analytic gradient against central finite differences.
    Gradcheck(GradcheckArgs),
    /// Write Robertson and entropic uncertainty records for one pair.
    Uncertainty(UncertaintyArgs),
}

#[derive(Args)]
pub struct GenArgs {
    /// Dataset family: example-a (learn a hidden unitary) or example-b
    /// (targets encode concurrence and purity).
    #[arg(long)]
    pub kind: String,
    /// Total number of pairs.
    #[arg(long)]
    pub n: usize,
    /// Train,validation counts, e.g. 10,90.
    #[arg(long)]
    pub split: String,
    #[arg(long)]
    pub seed: u64,
    /// Output dataset path (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct TrainArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset path (JSON).
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Seed for the network's initial parameters.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Gradient strategy: exact or paper-literal.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Output model path (JSON).
    #[arg(long)]
    pub out: Option<String>,
    /// Output round-log path (CSV).
    #[arg(long)]
    pub log: Option<String>,
    /// Log Robertson-bound statistics each round.
    #[arg(long)]
    pub probe_uncertainty: bool,
    /// Probe every k-th parameter slot when probing.
    #[arg(long)]
    pub probe_stride: Option<usize>,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Output per-pair CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct GradcheckArgs {
    /// Seed for the random network and pairs.
    #[arg(long)]
    pub seed: u64,
    /// Maximum allowed absolute gradient error.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Number of random pairs.
    #[arg(long, default_value_t = 2)]
    pub pairs: usize,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
}

#[derive(Args)]
pub struct UncertaintyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Training-pair index to probe.
    #[arg(long, default_value_t = 0)]
    pub pair: usize,
    /// Probe every k-th parameter slot.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => commands::run_gen(args),
        Command::Train(args) => commands::run_train(args),
        Command::Eval(args) => commands::run_eval(args),
        Command::Gradcheck(args) => commands::run_gradcheck(args),
        Command::Uncertainty(args) => commands::run_uncertainty(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
