use std::fmt;
use std::process::ExitCode;

/// CLI-level error with the exit-code mapping:
/// 1 validation, 2 resource cap, 3 internal consistency (bound violation).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Lib(qrlab::Error),
    /// A certified bound failed; carries a description for stderr.
    BoundViolation(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl From<qrlab::Error> for CliError {
    fn from(e: qrlab::Error) -> Self {
        CliError::Lib(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::BoundViolation(msg) => write!(f, "bound violation: {msg}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Io(_) => ExitCode::from(1),
            CliError::BoundViolation(_) => ExitCode::from(3),
            CliError::Lib(e) => match e {
                qrlab::Error::Argument(_)
                | qrlab::Error::Validation(_)
                | qrlab::Error::UnknownCode(_) => ExitCode::from(1),
                qrlab::Error::Resource(_) | qrlab::Error::DimensionLimit(_) => ExitCode::from(2),
                qrlab::Error::Solver(_) | qrlab::Error::Consistency(_) => ExitCode::from(3),
            },
        }
    }
}
