use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} {requested} exceeds the configured limit of {limit}")]
    LimitExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by a resource limit rather than bad input.
    pub fn is_limit(&self) -> bool {
        matches!(self, Error::LimitExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
