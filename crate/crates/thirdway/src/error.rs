use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: std::io::Error },

    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),

    #[error("input is not valid UTF-8 text")]
    Utf8,

    #[error("{0}")]
    Structure(String),

    #[error("data row {row} (line {line}), column {column}: cannot parse `{cell}` as a finite number")]
    Parse { row: usize, line: usize, column: String, cell: String },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] thirdway_core::Error),

    /// A problem with how the command was invoked.
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// Process exit status: 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) | Error::Core(thirdway_core::Error::ScenarioMismatch { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
