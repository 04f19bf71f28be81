use thiserror::Error;

/// Errors raised by construction checks and operations.
///
/// Numerical diagnostics are carried as `f64` regardless of the scalar type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        actual: Vec<usize>,
    },

    #[error("ket is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("operator is not Hermitian: max deviation {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("operator trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("operator is not idempotent: max deviation {deviation:e}")]
    NotIdempotent { deviation: f64 },

    #[error("operator is not unitary: max deviation {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("invalid spectral observable: {0}")]
    InvalidObservable(String),

    #[error("zero-probability event: probability {probability:e}")]
    ZeroProbability { probability: f64 },

    #[error("evolution does not factorize on the triggering subspace: max deviation {deviation:e}")]
    FactorizationViolation { deviation: f64 },

    #[error("twin check undefined: both events have zero probability ({prob_p:e}, {prob_q:e})")]
    UndefinedTwin { prob_p: f64, prob_q: f64 },

    #[error("RAIO preconditions violated: {0}")]
    PreconditionViolated(String),

    #[error("scenario construction failed: {0}")]
    Construction(String),

    #[error("scenario generation failed: {0}")]
    Generation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
