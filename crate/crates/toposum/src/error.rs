//! Error type shared by every fallible operation in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A denominator in an exact identity or partial sum is zero.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// An inverse function was evaluated outside its real domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A special function was evaluated at one of its poles.
    #[error("pole at {0}")]
    Pole(String),

    /// Numerical integration failed to reach the requested accuracy.
    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    /// An adaptive summation hit its node budget before reaching the tolerance.
    #[error("did not converge within budget: {0}")]
    NonConvergence(String),

    /// A traversal was asked to grow past its node budget.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// A river operation was called on a form that has no river.
    #[error("not an indefinite non-square discriminant: {0}")]
    NotIndefinite(String),

    /// The river walk failed to close up within the iteration cap.
    #[error("river period not found: {0}")]
    PeriodNotFound(String),

    /// A series name not present in the catalog.
    #[error("unknown series: {0}")]
    UnknownSeries(String),
}

pub type Result<T> = std::result::Result<T, Error>;
