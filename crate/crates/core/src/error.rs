use thiserror::Error;

/// A position in a source document, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: Location, message: String },

    #[error("invalid model: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("undeclared identifier `{name}` at {location}")]
    Undeclared { name: String, location: Location },

    #[error("type error at {location}: {message}")]
    Type { location: Location, message: String },

    #[error("exploration failed: {0}")]
    Exploration(String),

    #[error("state space exceeds the cap of {cap} states")]
    StateCap { cap: usize },

    #[error("deadlock: no command is enabled in state ({valuation})")]
    Deadlock { valuation: String },

    #[error("invalid property: {0}")]
    Property(String),

    #[error("unknown reward structure `{0}`")]
    UnknownReward(String),

    #[error("LP export: {0}")]
    Export(String),

    #[error("invalid strategy: {0}")]
    Strategy(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            location: Location { line, column },
            message: message.into(),
        }
    }
}
