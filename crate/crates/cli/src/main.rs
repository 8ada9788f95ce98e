use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use smc_repair::FactorName;

mod commands;
mod report;

/// Model checking and rate-reduction repair of time-bounded Until
/// requirements on labelled CTMCs.
#[derive(Debug, Parser)]
#[command(name = "smc-repair", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-state probabilities and verdicts. Exit 1 if any state violates.
    Check(Common),
    /// Synthesize reduction factors. Exit 3 if no satisfying factor exists.
    Repair(RepairArgs),
    /// Probability curves of the tracked states over one factor, as CSV.
    Sweep(SweepArgs),
    /// Class of every state.
    Partition(Common),
    /// Monte Carlo estimate for one start state.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Model file.
    model: PathBuf,
    /// Requirement, e.g. 'P<=0.2 [ "up" U<=5 "repair" ]'.
    #[arg(required_unless_present = "formula_file", conflicts_with = "formula_file")]
    formula: Option<String>,
    /// Read the requirement from a single-line file.
    #[arg(long, value_name = "PATH")]
    formula_file: Option<PathBuf>,
    /// Uniformisation truncation error.
    #[arg(long, default_value_t = 1e-9)]
    trunc_error: f64,
    /// Treat atoms that label no state as an error.
    #[arg(long)]
    strict_atoms: bool,
    /// Sum duplicate transitions instead of rejecting them.
    #[arg(long)]
    merge_duplicates: bool,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct RepairArgs {
    #[command(flatten)]
    common: Common,
    /// Binary search precision.
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Write the repaired model to this path.
    #[arg(long, value_name = "PATH")]
    emit_model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Factor to sweep.
    #[arg(long)]
    factor: FactorName,
    /// First grid point.
    #[arg(long, default_value_t = 0.01, conflicts_with = "points")]
    start: f64,
    /// Last grid point.
    #[arg(long, default_value_t = 1.0, conflicts_with = "points")]
    stop: f64,
    /// Number of equidistant grid points.
    #[arg(long, default_value_t = 100, conflicts_with = "points")]
    steps: usize,
    /// Explicit comma-separated grid instead of start/stop/steps.
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<f64>>,
    /// Value of i while another factor is swept.
    #[arg(long, default_value_t = 1.0)]
    fix_i: f64,
    #[arg(long, default_value_t = 1.0)]
    fix_j: f64,
    #[arg(long, default_value_t = 1.0)]
    fix_k: f64,
    /// Output file (stdout if absent).
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// Start state.
    #[arg(long, default_value_t = 0)]
    state: usize,
    /// Number of simulated paths.
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ignore the time bound.
    #[arg(long)]
    untimed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => commands::check(&args),
        Command::Repair(args) => commands::repair(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Partition(args) => commands::partition(&args),
        Command::Simulate(args) => commands::simulate(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
