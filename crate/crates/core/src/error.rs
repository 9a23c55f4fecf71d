use thiserror::Error;

/// Errors raised by samplers, statistics and the experiment engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidSpec(String),

    #[error("unsupported family for {op}: {family}")]
    UnsupportedFamily { op: &'static str, family: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sample too short: need at least {needed} values, got {got}")]
    SampleTooShort { needed: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("self-normalized sum undefined for an all-zero sample")]
    UndefinedRatio,

    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),

    #[error("grid point {index} (n = {n}): {source}")]
    Cell {
        index: usize,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no crossover: {0}")]
    NoCrossover(String),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
