use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violated a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An input fell outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature hit the subdivision limit before reaching the
    /// requested tolerance. Carries the best available partial result.
    #[error(
        "quadrature failed to converge ({context}): partial value {partial:.6e}, \
         error estimate {error_estimate:.3e} after {subdivisions} subdivisions"
    )]
    Convergence {
        context: String,
        partial: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// Reading or writing experiment artifacts failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
