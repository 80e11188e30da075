use std::path::PathBuf;

/// Errors produced by the analysis pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("signal too short: {0}")]
    Length(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The signal lacks the structure a feature needs (e.g. too few local extrema).
    #[error("insufficient structure: {0}")]
    InsufficientStructure(String),

    /// The feature is mathematically undefined for this input (e.g. all-zero spectrum).
    #[error("undefined for input: {0}")]
    UndefinedInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver did not converge after {iterations} iterations (max KKT violation {violation:.3e})")]
    Convergence { iterations: usize, violation: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for errors that a feature extractor records as a missing value
    /// instead of aborting.
    pub fn is_missing_value(&self) -> bool {
        matches!(self, Error::InsufficientStructure(_) | Error::UndefinedInput(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
