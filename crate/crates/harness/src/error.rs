use std::path::PathBuf;

use dcl::DclError;
use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

/// Process exit statuses of the command-line front end.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const CONFIG_INVALID: i32 = 2;
    pub const INVARIANT_VIOLATION: i32 = 3;
    pub const NUMERICAL_GUARD: i32 = 4;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },

    #[error(transparent)]
    Core(#[from] DclError),

    #[error("sweep result has no rows")]
    EmptyResult,
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => exit::CONFIG_INVALID,
            Self::Core(e) => core_exit_code(e),
            _ => exit::FAILURE,
        }
    }
}

/// Exit status for a core failure: bad parameters, a tripped grid guard, or
/// anything else.
pub fn core_exit_code(e: &DclError) -> i32 {
    match e {
        DclError::InvalidConfig(_) => exit::CONFIG_INVALID,
        DclError::GridEscape { .. }
        | DclError::SupportEscapesGrid { .. }
        | DclError::InvalidGrid(_)
        | DclError::MatrixTooLarge { .. } => exit::NUMERICAL_GUARD,
        _ => exit::FAILURE,
    }
}
