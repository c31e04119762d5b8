//! Batch driver: load a job file, dispatch, write CSV reports.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod job;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use runner::{RunConfig, EXIT_OK};

/// Weighted polynomial approximation jobs: classification, membership,
/// approximation, convergence sweeps, and isometry reports.
#[derive(Parser)]
#[command(name = "wapprox", version, about)]
struct Cli {
    /// Path to the job file.
    job: PathBuf,
    /// Override the zero threshold used by classification and inversion.
    #[arg(long)]
    tol_zero: Option<f64>,
    /// Override the tolerance of the membership limit conditions.
    #[arg(long)]
    tol_limit: Option<f64>,
    /// Override the base resolution of the evaluation grid.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Print the condition-by-condition verdict rationale (member task).
    #[arg(long)]
    explain: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = RunConfig {
        tol_zero: cli.tol_zero,
        tol_limit: cli.tol_limit,
        grid_n: cli.grid_n,
        explain: cli.explain,
    };
    let job = match job::load_job(&cli.job) {
        Ok(j) => j,
        Err(job::JobError::Io(e)) => {
            eprintln!("io error: {}: {e}", cli.job.display());
            return ExitCode::from(runner::EXIT_IO);
        }
        Err(job::JobError::Validation(m)) => {
            eprintln!("validation error: {m}");
            return ExitCode::from(runner::EXIT_VALIDATION);
        }
    };
    match runner::run_job(&job, &cfg) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(failure) => {
            if let Some(msg) = failure.message() {
                eprintln!("{msg}");
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
