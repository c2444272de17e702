//! `mols` command-line driver.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 solver-flagged failure,
//! 3 resource limit (enumeration too large).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mols::{AlgorithmSpec, SignalKind, SnrDb, SweepVariable};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_SOLVER_FAILURE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "mols", version, about = "Sparse recovery with multiple orthogonal least squares")]
pub struct Cli {
    /// Worker threads for sweeps and isometry enumeration (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// File of `key = value` lines mirroring the long flags; flags given on
    /// the command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random instance: matrix.txt, signal.txt, y.txt and, when
    /// noisy, noise.txt.
    Gen(GenArgs),
    /// Recover a sparse signal from a matrix and measurements.
    Recover(RecoverArgs),
    /// Run a seeded Monte-Carlo sweep and write the aggregated CSV.
    Sweep(SweepArgs),
    /// Enumerate exact isometry constants of a small matrix.
    Rip(RipArgs),
    /// Run MOLS on a known instance and evaluate the recovery, decay, probe
    /// and noise bounds against exact isometry constants.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// Sparsity K.
    #[arg(long)]
    pub k: usize,
    /// Nonzero distribution: gaussian or pam2.
    #[arg(long, default_value = "gaussian")]
    pub signal: SignalKind,
    /// SNR in dB, or `inf` for noiseless measurements.
    #[arg(long, default_value = "inf")]
    pub snr: SnrDb,
    /// Scale the columns to unit norm.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub normalize: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving the instance files (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct RecoverArgs {
    #[arg(long, value_name = "PATH")]
    pub matrix: PathBuf,
    /// Measurement vector file.
    #[arg(long, value_name = "PATH")]
    pub y: PathBuf,
    /// Sparsity K.
    #[arg(long)]
    pub k: usize,
    /// Solver, e.g. `mols:L=2`, `ols`, `omp`, `cosamp`, `irls`.
    #[arg(long, default_value = "mols:L=1")]
    pub alg: AlgorithmSpec,
    /// Reference signal; adds the error norm to the output.
    #[arg(long, value_name = "PATH")]
    pub truth: Option<PathBuf>,
    /// Seed recorded in the provenance line.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (stdout when absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Swept quantity: K, m or snr.
    #[arg(long, default_value = "K")]
    pub var: SweepVariable,
    /// `start:stop:step` (inclusive) or a comma-separated list.
    #[arg(long)]
    pub values: String,
    /// Rows (fixed unless m is swept).
    #[arg(long, default_value_t = 128)]
    pub m: usize,
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Sparsity (fixed unless K is swept).
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    /// SNR in dB or `inf` (fixed unless snr is swept).
    #[arg(long, default_value = "inf")]
    pub snr: SnrDb,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    /// Solver column; repeat for several.
    #[arg(long, required = true)]
    pub alg: Vec<AlgorithmSpec>,
    #[arg(long, default_value = "gaussian")]
    pub signal: SignalKind,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative error below which a recovery counts as exact.
    #[arg(long, default_value_t = 1e-6)]
    pub exact_tol: f64,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub normalize: bool,
    /// Output CSV (stdout when absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script for the CSV (requires --out).
    #[arg(long, value_name = "PATH", requires = "out")]
    pub plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RipArgs {
    #[arg(long, value_name = "PATH")]
    pub matrix: PathBuf,
    /// Largest support size enumerated.
    #[arg(long)]
    pub max_order: usize,
    /// Output CSV (stdout when absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_name = "PATH")]
    pub matrix: PathBuf,
    /// True signal; the measurements are `Phi x` plus the optional noise.
    #[arg(long, value_name = "PATH")]
    pub truth: PathBuf,
    /// Noise vector; enables the noisy probe and distortion checks.
    #[arg(long, value_name = "PATH")]
    pub noise: Option<PathBuf>,
    /// Greedy solver: `mols:L=<int>` or `ols`, with optional `eps=`.
    #[arg(long, default_value = "mols:L=1")]
    pub alg: AlgorithmSpec,
    /// Isometry orders to enumerate (default `min(n, (L + 1) K)`).
    #[arg(long)]
    pub max_order: Option<usize>,
    /// Output CSV (stdout when absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match config::merge_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let resource = e
                .downcast_ref::<mols::Error>()
                .is_some_and(|m| matches!(m, mols::Error::EnumerationTooLarge { .. }));
            ExitCode::from(if resource { EXIT_RESOURCE } else { EXIT_USAGE })
        }
    }
}
