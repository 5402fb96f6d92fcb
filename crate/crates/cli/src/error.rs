use std::fmt;
use std::io;

/// Command errors, split by exit code: usage mistakes exit 1, malformed or
/// incompatible data exits 2, failed numerical checks exit 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Check(m) => write!(f, "check failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hexgrid_core::HexError> for CliError {
    fn from(e: hexgrid_core::HexError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<hexgrid_nn::NnError> for CliError {
    fn from(e: hexgrid_nn::NnError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<hexgrid_datagen::DataError> for CliError {
    fn from(e: hexgrid_datagen::DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
