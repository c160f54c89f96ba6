use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coefficient vector is zero")]
    ZeroCoefficients,
    #[error(transparent)]
    Infeasible(#[from] Infeasible),
}

/// A case assignment whose sign-function averages cannot be realised.
///
/// This is an expected outcome for cases I and II, not a program fault.
#[derive(Debug, Clone, PartialEq)]
pub struct Infeasible {
    pub case: String,
    pub reason: String,
    /// Value under the square root (cases I and II), when that is the cause.
    pub discriminant: Option<f64>,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {} infeasible: {}", self.case, self.reason)
    }
}

impl std::error::Error for Infeasible {}
