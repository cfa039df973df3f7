//! Error classification for exit codes: 0 success, 1 usage, 2 bad input,
//! 3 internal invariant violation.

use std::fmt;

use gadgetry::archive::ArchiveError;
use gadgetry::detect::DetectError;
use gadgetry::evolution::EvolutionError;
use gadgetry::hierarchy::CatalogError;
use gadgetry::inject::InjectError;

#[derive(Debug)]
pub enum CliError {
    /// The invocation itself is wrong (flags, values, combinations).
    Usage(String),
    /// The inputs named by the invocation are unreadable or malformed.
    Input(String),
    /// A state the tool promises can never occur.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Input(m) => write!(f, "input: {m}"),
            CliError::Internal(m) => write!(f, "internal: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

impl From<ArchiveError> for CliError {
    fn from(e: ArchiveError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<DetectError> for CliError {
    fn from(e: DetectError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<EvolutionError> for CliError {
    fn from(e: EvolutionError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<InjectError> for CliError {
    fn from(e: InjectError) -> CliError {
        match e {
            InjectError::BadCallerName { .. } => CliError::Usage(e.to_string()),
            InjectError::Archive(_) | InjectError::ClassFile(_) => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Input(e.to_string())
    }
}
