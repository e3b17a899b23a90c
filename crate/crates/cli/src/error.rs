use thiserror::Error;

/// Failure of a CLI run, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<symlie::Error> for CliError {
    fn from(e: symlie::Error) -> Self {
        use symlie::Error as E;
        match e {
            E::Config(msg) => CliError::Config(msg),
            E::InvalidInput(_) => CliError::Config(e.to_string()),
            E::ChartSingularity { .. } | E::StepFailure { .. } | E::TrainingFailure { .. } => CliError::Numerical(e.to_string()),
            E::Version { .. } | E::Io(_) | E::Csv(_) | E::Json(_) => CliError::Io(e.to_string()),
        }
    }
}

impl CliError {
    /// Prefixes the message with the file it concerns.
    pub fn at_path(self, path: &std::path::Path) -> Self {
        let p = path.display();
        match self {
            CliError::Config(m) => CliError::Config(format!("{p}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{p}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{p}: {m}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
