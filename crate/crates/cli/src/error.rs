use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing configuration; `key` is the dotted path of the offending entry.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("usage error: {0}")]
    Usage(String),
    /// A computation produced a non-finite value or failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Maps a library error raised while validating section `section`.
    pub fn from_core(section: &str, err: osa_core::Error) -> Self {
        use osa_core::Error as E;
        match err {
            E::Diverged { .. } => CliError::Numeric(err.to_string()),
            E::InvalidParameter { name, reason } => {
                CliError::config(join_key(section, name), reason)
            }
            other => CliError::config(section, other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) | CliError::Input { .. } => exit::CONFIG,
            CliError::Numeric(_) => exit::NUMERIC,
            CliError::Io { .. } => exit::IO,
        }
    }
}

fn join_key(section: &str, name: &str) -> String {
    if section.is_empty() {
        name.to_string()
    } else {
        format!("{section}.{name}")
    }
}

pub type CliResult<T> = Result<T, CliError>;
