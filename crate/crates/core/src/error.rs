use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The rule or complex document does not match its schema.
    #[error("parse error at `{key}`: {message}")]
    Parse { key: String, message: String },

    #[error("unknown label `{label}` in image of `{key}`")]
    UnknownLabel { key: String, label: String },

    #[error("ragged block in image of `{key}`: {message}")]
    RaggedBlock { key: String, message: String },

    #[error("corona undetermined: {0}")]
    CoronaUndetermined(String),

    #[error("context undetermined: {0}")]
    ContextUndetermined(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The substitution route was requested for a rule not declared aperiodic.
    #[error("substitution route refused: {0}")]
    RouteRefused(String),

    #[error("not a cochain complex: coboundary squares to a nonzero map in degree {degree}")]
    NotAComplex { degree: usize },

    #[error("assignment does not cover cells: {}", cells.join(", "))]
    MissingAssignment { cells: Vec<String> },

    #[error("pattern `{0}` does not occur in the approximant")]
    UnknownPattern(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            key: key.into(),
            message: message.into(),
        }
    }
}
