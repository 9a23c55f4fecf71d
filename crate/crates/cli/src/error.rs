use std::path::PathBuf;

use outlierfreq_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const DATA: i32 = 3;
    pub const NO_CROSSOVER: i32 = 4;
    pub const INSUFFICIENT_PRECISION: i32 = 5;
    pub const REPLAY_MISMATCH: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    ConfigLine {
        path: String,
        line: usize,
        message: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ConfigLine { .. } => exit::CONFIG,
            CliError::Data(_) | CliError::Io { .. } => exit::DATA,
            CliError::ReplayMismatch(_) => exit::REPLAY_MISMATCH,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::NoCrossover(_) => exit::NO_CROSSOVER,
        CoreError::InsufficientPrecision(_) => exit::INSUFFICIENT_PRECISION,
        CoreError::NonFinite { .. }
        | CoreError::SampleTooShort { .. }
        | CoreError::UndefinedRatio => exit::DATA,
        CoreError::Cell { source, .. } => core_exit_code(source),
        _ => exit::CONFIG,
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
