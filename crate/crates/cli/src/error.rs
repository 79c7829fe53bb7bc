use thiserror::Error;

/// Failure classes, each with a fixed process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unparseable or invariant-violating input (exit 2).
    #[error("input error: {0}")]
    Input(String),
    /// The computation itself could not be carried out (exit 1).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A result contradicted what must hold by construction (exit 3).
    #[error("internal consistency alarm: {0}")]
    Alarm(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Input(_) => 2,
            CliError::Alarm(_) => 3,
        }
    }

    /// Classifies an error raised while a pipeline runs on validated input.
    pub fn from_pipeline(e: qlocal::Error) -> Self {
        match e {
            qlocal::Error::Consistency(m) => CliError::Alarm(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
