use std::fmt;

use hcr_core::Error;

/// Process exit codes.
pub const EXIT_IO: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_AMBIGUOUS: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_PRECONDITION,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::TooFewObservations(_) | Error::ConstantSeries(_) => EXIT_PRECONDITION,
            Error::Ambiguous(_) => EXIT_AMBIGUOUS,
            _ => EXIT_IO,
        };
        let message = match &e {
            Error::Ambiguous(_) => format!("{e}; rerun with --allow-unmatched to count them as unmatched"),
            _ => e.to_string(),
        };
        CliError { code, message }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::io(e.to_string())
    }
}
