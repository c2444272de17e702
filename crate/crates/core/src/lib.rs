//! Sparse recovery with multiple orthogonal least squares (MOLS).
//!
//! The crate is organised bottom-up:
//!
//! * [`problem`]: sensing matrices, sparse signals, noise and instance generation.
//! * [`linalg`]: incremental Gram-Schmidt QR, least squares on a support and
//!   projected column norms.
//! * [`identify`]: the per-iteration selection rule, both as a brute-force
//!   projection oracle and as the fast correlation-ratio rule.
//! * [`greedy`]: MOLS (with OLS as `L = 1`) and OMP.
//! * [`baselines`]: CoSaMP, IRLS (`p = 1`) and the oracle least-squares estimator.
//! * [`analysis`]: exact isometry constants by enumeration and checkers for the
//!   recovery, convergence and distortion bounds.
//! * [`experiments`]: seeded Monte-Carlo sweeps and their CSV tables.
//! * [`io`]: plain-text matrix, vector and signal files.
//!
//! ```
//! use mols::problem::{generate_gaussian_matrix, generate_sparse_signal};
//! use mols::{mols, AlgorithmParams, ProblemInstance, SignalKind};
//!
//! let phi = generate_gaussian_matrix(128, 256, 1, true);
//! let x = generate_sparse_signal(256, 30, SignalKind::Gaussian, 2).unwrap();
//! let inst = ProblemInstance::noiseless(phi, x.clone()).unwrap();
//! let params = AlgorithmParams::new(30, 5).with_strict_selection_bound(false);
//! let out = mols(&inst, &params).unwrap();
//! assert!(out.error_norm(&x) < 1e-6 * x.norm());
//! ```

pub mod analysis;
pub mod baselines;
pub mod error;
pub mod experiments;
pub mod greedy;
pub mod identify;
pub mod io;
pub mod linalg;
pub mod problem;
pub mod rng;

pub use analysis::{BoundCheck, Relation, RipReport};
pub use baselines::{cosamp, irls, oracle_ls};
pub use error::{Error, Result};
pub use experiments::{AlgorithmSpec, SweepSpec, SweepTable, SweepVariable};
pub use greedy::{mols, ols, omp, IterationRecord, RecoveryResult, Termination};
pub use identify::{select_fast, select_naive, SelectionOutcome};
pub use linalg::{IncrementalBasis, ProjectedNorms};
pub use problem::{
    AlgorithmParams, ProblemInstance, ResidualThreshold, SensingMatrix, SignalKind, SnrDb,
    SparseSignal,
};

/// Version string written into CSV provenance lines.
pub const TOOL_VERSION: &str = concat!("mols-", env!("CARGO_PKG_VERSION"));
