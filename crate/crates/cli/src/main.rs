use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod plot;

/// Onset-of-synchronization experiments for the inertial Kuramoto model on
/// graphs.
#[derive(Debug, Parser)]
#[command(name = "kil", version, about)]
struct Cli {
    /// Experiment config (JSON, schema_version 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's output_dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the parallel paths.
    #[arg(long, global = true, env = "KIL_THREADS")]
    threads: Option<usize>,
    /// Base seed; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical coupling and pitchfork constants, as JSON and a table.
    Predict,
    /// Critical curve CSV and gnuplot script.
    Curve,
    /// Eigenvalue trajectory λ(K) over the config's k_grid.
    Eig,
    /// Simulation sweep over the config's k_grid.
    Sweep,
    /// Oracle and property checks.
    Selftest,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    if let Command::Selftest = cli.command {
        return commands::selftest();
    }
    let path = cli
        .config
        .ok_or_else(|| anyhow::anyhow!("--config <path> is required for this command"))?;
    let mut config = config::ExperimentConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = cli.out {
        config.output_dir = out;
    }
    match cli.command {
        Command::Predict => commands::predict(&config),
        Command::Curve => commands::curve(&config),
        Command::Eig => commands::eig(&config),
        Command::Sweep => commands::sweep(&config),
        Command::Selftest => unreachable!(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kil: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
