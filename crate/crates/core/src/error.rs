use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The rotation is too close to angle π for the requested chart.
    #[error("chart singularity: rotation angle {angle:.6} rad is outside the chart domain")]
    ChartSingularity { angle: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    /// An implicit step did not converge.
    #[error("step failure{}: residual {residual:.3e} after {iterations} iterations", step_suffix(.step))]
    StepFailure {
        step: Option<usize>,
        residual: f64,
        iterations: usize,
    },

    #[error("training diverged at step {step}")]
    TrainingFailure { step: usize },

    #[error("unsupported {kind} version {found} (expected {expected})")]
    Version {
        kind: String,
        found: String,
        expected: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn step_suffix(step: &Option<usize>) -> String {
    match step {
        Some(s) => format!(" at step {s}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach a step index to a [`Error::StepFailure`]; other variants pass through.
    pub fn at_step(self, index: usize) -> Self {
        match self {
            Error::StepFailure {
                residual,
                iterations,
                ..
            } => Error::StepFailure {
                step: Some(index),
                residual,
                iterations,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
