use std::fmt;

/// Process exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    /// Bad arguments or configuration.
    Usage = 1,
    /// Unreadable or invalid data, or a run that failed for a reason other
    /// than infeasibility.
    Data = 2,
    /// Every run of a sweep was infeasible.
    AllInfeasible = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// An error tagged with the exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit: Exit::Usage,
            error: error.into(),
        }
    }

    pub fn data(error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit: Exit::Data,
            error: error.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
