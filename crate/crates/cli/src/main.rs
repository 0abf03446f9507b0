//! Configuration-driven entry point: simulate, check, fit, evaluate, study
//! and diagnose, with deterministic seeding and file-based reports.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "erm-forecast",
    about = "Simulation, estimation and experiment harness for ERM over recursive threshold forecasters",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file (strict: unknown keys are errors).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a path and write `path.csv`.
    Simulate(CommonArgs),
    /// Validate the stability assumption and certify the loss pairing.
    Check(CommonArgs),
    /// Fit the ERM and report in/out-of-sample risks (`fit.json`).
    Fit(CommonArgs),
    /// Fit plus excess risk against a reference set (`evaluate.json`).
    Evaluate(CommonArgs),
    /// Run the oracle-rate study (`study.json`, `study.csv`).
    Study(CommonArgs),
    /// Moment and dependence diagnostics (`diagnose.json`, `loss_acf.csv`).
    Diagnose(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, fn(&std::path::Path, Option<u64>, Option<PathBuf>) -> Result<(), commands::CommandError>) =
        match &cli.command {
            Command::Simulate(a) => (a, commands::cmd_simulate),
            Command::Check(a) => (a, commands::cmd_check),
            Command::Fit(a) => (a, commands::cmd_fit),
            Command::Evaluate(a) => (a, commands::cmd_evaluate),
            Command::Study(a) => (a, commands::cmd_study),
            Command::Diagnose(a) => (a, commands::cmd_diagnose),
        };

    if let Some(threads) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot size the worker pool: {e}");
            return ExitCode::from(1);
        }
    }

    match run(&args.config, args.seed, args.out.clone()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
