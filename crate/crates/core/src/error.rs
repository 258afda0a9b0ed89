use thiserror::Error;

/// Errors raised by the distributions, the model and the test harnesses.
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution or model was constructed with invalid parameters.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A density was evaluated outside of its support.
    #[error("value outside support: {0}")]
    Domain(String),

    /// A density at this point is infinite (e.g. a Dirichlet with α < 1 at a simplex face).
    #[error("infinite density: {0}")]
    InfiniteDensity(String),

    /// Array arguments whose lengths cannot be broadcast together.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Bad caller input: unknown block, unknown mutant, zero trials, ...
    #[error("usage: {0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
