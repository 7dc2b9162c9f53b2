use std::fmt;

/// Failure of a subcommand, carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid input, malformed files, I/O errors: exit 2.
    Input(String),
    /// A well-formed input that fails the check being run: exit 1.
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Check(m) => f.write_str(m),
        }
    }
}

impl From<normplane::Error> for CliError {
    fn from(e: normplane::Error) -> Self {
        use normplane::Error::*;
        match e {
            NotSelfContracted { .. } | BothComponentsOccupied { .. } | BoundExceeded { .. } => {
                CliError::Check(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("I/O error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
