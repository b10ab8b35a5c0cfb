//! Error types shared across the crate.

use crate::variogram::MaternParams;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad inputs: malformed files, precondition violations, usage errors.
    Validation,
    /// The numerics gave up: singular systems, failed factorizations.
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty sample set")]
    EmptySampleSet,

    #[error("non-finite sample")]
    NonFiniteSample,

    #[error("grid mismatch: curves live on different quantile grids")]
    GridMismatch,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid barycentric weights: {0}")]
    InvalidBarycentricWeights(String),

    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),

    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),

    #[error("duplicate locations")]
    DuplicateLocations,

    #[error("no pairs in range")]
    NoPairsInRange,

    #[error("zero variance data")]
    ZeroVarianceData,

    #[error("fewer than 2 points")]
    TooFewPoints,

    #[error(
        "ill-conditioned Kriging system (sigma2={}, length_scale={}, nu={})",
        params.sigma2, params.length_scale, params.nu
    )]
    IllConditioned { params: MaternParams },

    #[error("QP did not converge")]
    QpDidNotConverge,

    #[error("degenerate constraint normalization")]
    DegenerateConstraintNormalization,

    #[error("invalid LOO variance (ill-posed system)")]
    InvalidLooVariance,

    #[error("no admissible candidate")]
    NoAdmissibleCandidate,

    #[error("covariance not SPD")]
    CovarianceNotSpd,

    #[error("empty test set")]
    EmptyTestSet,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dataset validation failed:\n{}", .0.join("\n"))]
    DatasetValidation(Vec<String>),

    #[error("usage: {0}")]
    Usage(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Classify for exit-code purposes: validation errors exit 1,
    /// numerical failures exit 2.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::IllConditioned { .. }
            | Error::QpDidNotConverge
            | Error::DegenerateConstraintNormalization
            | Error::InvalidLooVariance
            | Error::NoAdmissibleCandidate
            | Error::CovarianceNotSpd => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        }
    }
}
