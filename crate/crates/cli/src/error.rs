use std::fmt;

use hmp_core::HmpError;

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    /// Search refused or generation gave up.
    Refused(String),
    Io(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Refused(_) => 3,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Refused(m) => write!(f, "refused: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<HmpError> for CliError {
    fn from(e: HmpError) -> Self {
        match e {
            HmpError::Refused { .. } => CliError::Refused(e.to_string()),
            HmpError::InvalidInput(_) | HmpError::RelationUndefined { .. } => {
                CliError::Invalid(e.to_string())
            }
        }
    }
}
