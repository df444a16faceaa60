use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("argument {t} outside the domain (0, {end})")]
    Domain { t: f64, end: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("critical function unavailable: reciprocal tail integral diverges at t = {t}")]
    Divergent { t: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solver accuracy: {detail} (measured {measured:e}, tolerance {tolerance:e})")]
    SolverAccuracy {
        detail: String,
        measured: f64,
        tolerance: f64,
    },

    #[error("zero resolution: zeros at {first} and {second} closer than separation floor {floor:e}")]
    Resolution { first: f64, second: f64, floor: f64 },

    #[error("horizon {horizon} exhausted with {found} of {needed} zeros")]
    Horizon { horizon: f64, found: usize, needed: usize },

    #[error("quadrature did not converge on [{a}, {b}]: error estimate {error:e}")]
    Quadrature { a: f64, b: f64, error: f64 },

    #[error("eigenvalue oracle: {0}")]
    Oracle(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn parameter(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
