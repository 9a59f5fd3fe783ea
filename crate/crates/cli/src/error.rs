use realspec::Error;

/// Stable exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidGrid(_)
            | Error::InvalidParameter(_)
            | Error::SizeOverflow { .. }
            | Error::NonRealGenerator { .. }
            | Error::Pole { .. }
            | Error::SymmetryViolation { .. }
            | Error::NotDecayed { .. }
            | Error::CoincidentEtas { .. }
            | Error::UnstableStep { .. }
            | Error::LengthMismatch { .. } => CliError::Config(e.to_string()),
            Error::NonFinite { .. }
            | Error::NoConvergence(_)
            | Error::MissingEigenvectors(_)
            | Error::EigenrelationResidual { .. }
            | Error::NonMonotone { .. } => CliError::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
