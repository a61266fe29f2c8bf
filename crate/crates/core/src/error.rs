use thiserror::Error;

/// Errors produced by the quaternion-matrix geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("the zero quaternion has no inverse")]
    ZeroQuaternion,

    #[error("matrix is singular (pivot magnitude {pivot:e})")]
    Singular { pivot: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not symplectic (|KK^+ - I| = {deviation:e})")]
    NotSymplectic { deviation: f64 },

    #[error("matrix is not positive-definite (eigenvalue {eigenvalue:e}, largest {largest:e})")]
    NotPositiveDefinite { eigenvalue: f64, largest: f64 },

    #[error("tangent vector is based at a different point")]
    BaseMismatch,

    #[error("matrix is not skew-Hermitian (deviation {deviation:e})")]
    NotSkew { deviation: f64 },

    #[error("eigenvalue pairing failed: {0}")]
    Pairing(String),

    #[error("non-finite entry in matrix")]
    NonFinite,

    #[error("value {value} outside tabulated range [{min}, {max}]; widen the eta grid")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("no convergence after {iterations} iterations (gradient norm {grad_norm:e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
