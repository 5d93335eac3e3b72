//! `levelrate`: experiment runner for schedule, descent, and level-set
//! connectivity studies.

use std::path::PathBuf;
use std::process::ExitCode as ProcessExit;

use clap::{Args, Parser, Subcommand};

use levelrate_cli::commands::{
    run_gradcheck_command, run_optimize_sweep, run_report, run_topology,
};
use levelrate_cli::config::Overrides;

#[derive(Parser)]
#[command(
    name = "levelrate",
    version,
    about = "Training runs, gradient checks, and loss-landscape connectivity sweeps",
    after_help = "Exit codes: 0 success, 1 check failure or diverged run, 2 config error, 3 runtime error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOverrides {
    /// Output directory (overrides LEVELRATE_OUT and the config file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the number of training steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Override the run seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonOverrides {
    fn to_overrides(&self) -> Overrides {
        Overrides { out_dir: self.out.clone(), steps: self.steps, seed: self.seed }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run gradient descent and write trajectory.csv, stability.json, and a
    /// manifest. Repeat --config for a sweep of independent runs.
    Optimize {
        /// JSON experiment config; may be given several times.
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
        /// Worker threads for a multi-config sweep.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        overrides: CommonOverrides,
    },
    /// Sample the objective on a grid and write grid.csv plus
    /// connectivity.json with threshold sweeps (and the modulation
    /// comparison when configured).
    Topology {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: CommonOverrides,
    },
    /// Verify every built-in analytic gradient against central differences.
    Gradcheck {
        /// Directory for gradcheck.json.
        #[arg(long)]
        out: PathBuf,
        /// Random evaluation points per objective.
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Aggregate run manifests under a directory into one summary JSON.
    Report {
        /// Directory containing run directories.
        #[arg(long)]
        runs: PathBuf,
        /// Write the summary here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ProcessExit {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Optimize { config, jobs, overrides } => {
            run_optimize_sweep(config, &overrides.to_overrides(), *jobs)
        }
        Command::Topology { config, overrides } => run_topology(config, &overrides.to_overrides()),
        Command::Gradcheck { out, points, seed } => run_gradcheck_command(out, *points, *seed),
        Command::Report { runs, out } => run_report(runs, out.as_deref()),
    };
    match result {
        Ok(code) => ProcessExit::from(code.code() as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ProcessExit::from(err.exit_code().code() as u8)
        }
    }
}
