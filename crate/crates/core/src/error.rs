use thiserror::Error;

/// Errors produced by state construction, linear algebra, and readout analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid dimension {dim}")]
    InvalidDimension { dim: usize },

    #[error("cannot normalize a (near-)zero vector (squared norm {norm_sqr:e})")]
    ZeroVector { norm_sqr: f64 },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemiDefinite { min_eigenvalue: f64 },

    #[error("operator trace is not 1 (got {trace})")]
    InvalidTrace { trace: f64 },

    #[error("vectors are not pairwise orthonormal (max Gram deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("{name} must lie in [{min}, {max}], got {value}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("which-way detector stage requires the detector to be in its initial state")]
    DetectorAlreadyCoupled,

    #[error("quanton outcome has probability {probability:e}; detector projection is undefined")]
    ZeroProbabilityOutcome { probability: f64 },

    #[error("outcome vector is orthogonal to both conditional detector states")]
    UndefinedOutcome,

    #[error("measurement basis misses part of the detector support (weights sum to {weight_sum})")]
    IncompleteBasis { weight_sum: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
