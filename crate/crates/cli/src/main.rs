//! `subsup`: benchmarks, theorem fuzzing and the thin wrappers around the
//! library's solvers.
//!
//! Exit codes: 0 on success, 1 when a check reports a violation or the
//! target is infeasible, 2 on configuration and input errors.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(name = "subsup", version, about = "Submodular maximization under supermodular costs")]
struct Cli {
    /// Worker threads; defaults to the available parallelism. Outputs do not
    /// depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare ratio-marginal against the baselines and write CSV curves
    /// and a JSON report.
    Bench(commands::BenchArgs),
    /// Run greedy on the adversarial tightness instance.
    Tightness(commands::TightnessArgs),
    /// Fuzz the approximation guarantees on random instances.
    Verify(commands::VerifyArgs),
    /// Minimize cost subject to an objective target.
    Dual(commands::DualArgs),
    /// Exact curvatures of an instance, with witnesses.
    Curvature(commands::CurvatureArgs),
    /// Evaluate every closed-form guarantee at one point.
    Bounds(commands::BoundsArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use subsup::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible { .. } | Error::TargetUnreachable { .. } | Error::PrimalFailure { .. }) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Bench(a) => commands::bench(a),
        Command::Tightness(a) => commands::tightness(a),
        Command::Verify(a) => commands::verify(a),
        Command::Dual(a) => commands::dual(a),
        Command::Curvature(a) => commands::curvature(a),
        Command::Bounds(a) => commands::bounds(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(exit_code(&e))
    })
}
