//! `eigadm`: eigenvalue shrinkage estimation and risk simulation from the
//! command line.
//!
//! Exit codes: 0 success, 1 selftest failure, 2 usage or validation error,
//! 3 I/O error. Every error prints a single line `error: ...` to stderr.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "eigadm",
    version,
    about = "Shrinkage estimation of covariance eigenvalues and Monte Carlo risk tables"
)]
pub struct Cli {
    /// JSON config file; explicit flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// RNG seed; falls back to config, then $EIGADM_SEED, then 42.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate population eigenvalues from a spectrum or covariance matrix.
    Estimate {
        /// JSON input: {"spectrum": [...]}, {"matrix": [[...], ...]} or a
        /// bare descending array.
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Degrees of freedom of the scatter matrix.
        #[arg(long)]
        nu: f64,
        /// Integration points for the mixing matrix.
        #[arg(long)]
        n_points: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Simulate the risk of one estimator at one parameter point.
    Risk {
        /// Dimension; must match --lambda when given.
        #[arg(long)]
        p: Option<usize>,
        /// Degrees of freedom of the scatter matrix.
        #[arg(long)]
        nu: f64,
        /// Comma-separated population eigenvalues, descending.
        #[arg(long)]
        lambda: String,
        /// One of psi_star, phi_star, mle.
        #[arg(long)]
        estimator: String,
        /// Wishart replicates.
        #[arg(long)]
        n_rep: Option<usize>,
        /// Integration points per mixing matrix.
        #[arg(long)]
        n_points: Option<usize>,
        /// fresh: new integration points per replicate; frozen: one shared set.
        #[arg(long)]
        tau_points: Option<String>,
        /// Output file; stdout when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// csv or json (default json).
        #[arg(long)]
        format: Option<String>,
    },
    /// Reproduce one of the built-in risk tables.
    Tables {
        /// 1 (p=2, 7 eigenvalue patterns) or 2 (p=3, 9 patterns).
        #[arg(long)]
        table: u8,
        /// Wishart replicates per cell.
        #[arg(long)]
        n_rep: Option<usize>,
        /// Integration points per mixing matrix.
        #[arg(long)]
        n_points: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// csv or json (default csv).
        #[arg(long)]
        format: Option<String>,
    },
    /// Run the built-in invariant checks; exit 1 if any fails.
    Selftest {
        /// Append a synthetic failing check to exercise the failure path.
        #[arg(long, hide = true)]
        inject_failure: bool,
    },
}

fn main() -> ExitCode {
    commands::run(Cli::parse())
}
