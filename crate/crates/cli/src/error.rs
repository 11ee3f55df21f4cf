use std::fmt;

use specseg::Error;

/// Failure of one CLI invocation, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable input: bad CSV, bad spec file, bad flag value.
    Parse(String),
    /// The configuration admits no valid run.
    Infeasible(String),
    /// The data carries no spectral information to segment.
    Degenerate(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Degenerate(_) => 4,
        }
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible configuration: {m}"),
            CliError::Degenerate(m) => write!(f, "degenerate data: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. } | Error::UnknownCase(_) | Error::NonCausalAr(_) => CliError::Parse(msg),
            Error::EmptyInput(_) | Error::ZeroSegment { .. } | Error::ZeroMass | Error::DegenerateData(_) => {
                CliError::Degenerate(msg)
            }
            Error::TooManyFailures { .. } => CliError::Degenerate(msg),
            _ => CliError::Infeasible(msg),
        }
    }
}
