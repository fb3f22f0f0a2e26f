use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation was called out of protocol order (e.g. update before predict).
    #[error("protocol violation: {0}")]
    Protocol(String),

    /// A component was wired into a setting where its guarantee does not hold.
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("oracle contract violated: {0}")]
    ContractViolation(String),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("weak learner failed in round {round}: {source}")]
    WeakLearner {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("run with seed {seed} failed: {source}")]
    Run {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
