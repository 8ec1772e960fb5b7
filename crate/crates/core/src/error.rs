use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("ambiguous eigenvalue clustering: gap {gap:.3e} between {lower:.6e} and {upper:.6e} is within 10x of tolerance {tol:.3e}")]
    AmbiguousDegeneracy {
        gap: f64,
        lower: f64,
        upper: f64,
        tol: f64,
    },

    #[error("dark state undefined: {0}")]
    DarkStateUndefined(String),

    #[error("no protocol schedule: effective Rabi frequency is zero")]
    NoSchedule,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
