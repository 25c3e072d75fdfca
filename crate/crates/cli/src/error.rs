use std::io;
use std::path::PathBuf;

use decospan_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("stretch {measured} exceeds the bound {bound}")]
    Verification { measured: f64, bound: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    /// 0 success, 2 invalid input, 3 verification failure, 4 internal cap exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification { .. } => 3,
            CliError::Core(e) => match e.root() {
                CoreError::CoverageCapExceeded { .. }
                | CoreError::CarvingCapExceeded(_)
                | CoreError::DisconnectedCluster { .. } => 4,
                _ => 2,
            },
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
