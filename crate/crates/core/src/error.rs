use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The iterate and violation are widened to `f64` regardless of the
    /// scalar type the solver ran in.
    #[error("solver did not converge after {iterations} sweeps (KKT violation {violation:e})")]
    NotConverged {
        iterate: Vec<f64>,
        violation: f64,
        iterations: usize,
    },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors originating in the numerical solvers rather than in
    /// the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::NumericalFailure(_)
        )
    }
}
