use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("not trace preserving: deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotTracePreserving { deviation: f64, tol: f64 },

    #[error("not completely positive: eigenvalue {eigenvalue:.3e} below floor {floor:.3e}")]
    NotCompletelyPositive { eigenvalue: f64, floor: f64 },

    #[error("not unitary: deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("not an isometry: deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotIsometry { deviation: f64, tol: f64 },

    #[error("dilation is not minimal: {0}")]
    NotMinimal(String),

    #[error("dilations describe different channels: {0}")]
    DilationMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A construction that must succeed by theory did not; points at a bug or
    /// at a tolerance that is too tight for the inputs.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
