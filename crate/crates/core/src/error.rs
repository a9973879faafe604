use chrono::NaiveDate;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Input data violates a series invariant (duplicate date, bad level, ...).
    #[error("invalid data for {sector}: {message}")]
    InvalidData { sector: String, message: String },

    #[error("duplicate date {date} in series {sector}")]
    DuplicateDate { sector: String, date: NaiveDate },

    #[error("alignment failed: {0}")]
    Alignment(String),

    /// Contract violation on arguments or configuration.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("degenerate pair ({0}, {1}): correlation sign undefined")]
    DegeneratePair(String, String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code for the CLI: 2 for validation errors, 3 for data errors.
    pub fn exit_code(&self) -> u8 {
        match self.root() {
            Error::Validation(_) => 2,
            _ => 3,
        }
    }
}
