use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("model is not identifiable: {0}")]
    NonIdentifiable(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// More bootstrap refits failed than the redraw budget allows.
    #[error("degenerate bootstrap: {failed} of {attempted} refits failed")]
    DegenerateBootstrap {
        failed: usize,
        attempted: usize,
        /// Statistic values from the refits that did succeed.
        partial: Vec<f64>,
    },

    #[error("observer kind mismatch: expected {expected}")]
    KindMismatch { expected: &'static str },

    #[error("session is complete")]
    SessionComplete,

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("schema violation at {field}: {message}")]
    SchemaViolation { field: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }

    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaViolation {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
