use std::fmt;
use std::io;
use std::path::Path;

/// Everything a subcommand can fail with, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or flag combinations (exit 2).
    Usage(String),
    /// Bad input data or I/O trouble (exit 1). `line` is 1-based.
    Data {
        path: String,
        line: Option<u64>,
        message: String,
    },
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn data(path: &Path, line: Option<u64>, message: impl fmt::Display) -> Self {
        CliError::Data {
            path: path.display().to_string(),
            line,
            message: message.to_string(),
        }
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        CliError::data(path, None, err)
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data {
                path,
                line: Some(line),
                message,
            } => write!(f, "{path}:{line}: {message}"),
            CliError::Data {
                path,
                line: None,
                message,
            } => write!(f, "{path}: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
