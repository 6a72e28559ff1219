use std::path::PathBuf;

/// Errors surfaced by the runner and CLI, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed input file content.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

pub type SimResult<T> = Result<T, SimError>;

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 config or input error, 2 numeric failure, 3 I/O error.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::Parse { .. } => 1,
            SimError::Numeric(_) => 2,
            SimError::Io { .. } => 3,
        }
    }
}

impl From<grassfeed_core::Error> for SimError {
    fn from(e: grassfeed_core::Error) -> Self {
        use grassfeed_core::Error as E;
        match e {
            E::Domain(_) | E::Config(_) => SimError::Config(e.to_string()),
            E::Numeric(_) | E::Resource(_) | E::Framing(_) | E::Role(_) => SimError::Numeric(e.to_string()),
        }
    }
}
