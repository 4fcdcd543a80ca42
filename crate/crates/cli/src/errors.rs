//! Error-to-exit-code mapping for the command line.
//!
//! 0 success, 2 configuration error, 3 data error, 4 numeric failure,
//! 5 validation failure.

use robust_bvs_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Numeric(String),
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Validation(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) | CliError::Numeric(m) | CliError::Validation(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        let msg = e.to_string();
        match e {
            CoreError::Config(_) | CoreError::InvalidHyperparameters(_) | CoreError::Contract(_) => {
                CliError::Config(msg)
            }
            CoreError::SingularDesign { .. }
            | CoreError::InsufficientData { .. }
            | CoreError::DegenerateNull { .. } => CliError::Data(msg),
            CoreError::Domain(_) | CoreError::Numeric(_) => CliError::Numeric(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Data(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> CliError {
        CliError::Data(format!("csv error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
