use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),

    /// Data that loaded fine but cannot be used as asked, e.g. a test set
    /// whose feature dimension differs from the training set's.
    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Core(#[from] tsstss::Error),

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl BenchError {
    /// Process exit code: 1 config, 2 data/format/IO, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 1,
            BenchError::Data(_) | BenchError::Output { .. } => 2,
            BenchError::Core(e) if e.is_numerical() => 3,
            BenchError::Core(tsstss::Error::InvalidInput(_)) => 1,
            BenchError::Core(_) => 2,
        }
    }
}
