use thiserror::Error;

/// Errors raised by generation, solvers, analysis and I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid sparsity: K = {k} must satisfy 1 <= K <= {n}")]
    InvalidSparsity { k: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("instance has no ground-truth signal")]
    MissingGroundTruth,

    #[error("instance has no noise vector")]
    MissingNoise,

    #[error("column {index} is numerically in the span of the current basis")]
    RankDeficient { index: usize },

    #[error("only {available} admissible candidates left, {requested} requested")]
    ExhaustedCandidates { available: usize, requested: usize },

    #[error("probe not applicable: every true index is already selected")]
    ProbeNotApplicable,

    #[error("enumeration too large: {count} supports (limit {limit}, n <= {max_n})")]
    EnumerationTooLarge { count: u128, limit: u128, max_n: usize },

    #[error("isometry constant of order {0} is missing from the report")]
    MissingOrder(usize),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("missing oracle rows for sweep value {0}")]
    MissingOracleRows(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
