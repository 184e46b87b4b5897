use thiserror::Error;

/// Errors raised by the numerical routines and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument lies within the pole tolerance of a pole of Γ.
    #[error("pole: argument {0} is within tolerance of a pole of the Gamma function")]
    Pole(f64),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An adaptive procedure exhausted its budget before meeting its tolerance.
    #[error("convergence failure in {what}: {detail}")]
    Convergence { what: &'static str, detail: String },

    #[error("unsupported dimension n = {0} (direct evaluation supports n <= 3)")]
    UnsupportedDimension(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Convergence {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
