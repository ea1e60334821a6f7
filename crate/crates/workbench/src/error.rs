use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error(transparent)]
    Core(#[from] vibes_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("journal {path}: {message}")]
    Journal { path: String, message: String },
}

impl WorkbenchError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Attaches the offending path to errors from reading an input file.
pub(crate) fn with_path<T>(path: &std::path::Path, r: vibes_core::Result<T>) -> Result<T> {
    r.map_err(|e| WorkbenchError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub type Result<T, E = WorkbenchError> = std::result::Result<T, E>;
