use thiserror::Error;

/// Failures mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Consistency(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Precondition(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Consistency(_) => 5,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<equiproj::Error> for CliError {
    fn from(e: equiproj::Error) -> Self {
        use equiproj::Error as E;
        match e {
            E::NotNormal { .. } | E::Unsupported(_) | E::SizeGuard { .. } => CliError::Precondition(e.to_string()),
            E::Inconsistent(_) => CliError::Consistency(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("json: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(format!("csv: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
