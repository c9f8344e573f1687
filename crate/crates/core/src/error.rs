use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical control parameter (tolerance, grid size, ...) is out of range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The requested accuracy could not be certified. Carries the best
    /// estimate and the bound that was achieved.
    #[error("error bound {bound:.3e} exceeds tolerance {tol:.3e} (best estimate {estimate:.12e})")]
    ErrorTooLarge { estimate: f64, bound: f64, tol: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
