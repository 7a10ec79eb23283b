use epx::error::{LocatorError, ModelError, SpectralError, TraceError};
use epx::io::FormatError;

/// Failures with their process exit codes: 2 usage, 3 degenerate family,
/// 4 contour too close to an exceptional point, 5 numerical failure.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("degenerate family: {0}")]
    Degenerate(String),
    #[error("{0}")]
    EpProximity(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::EpProximity(_) => 4,
            CliError::Numerical(_) | CliError::Output(_) => 5,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Degenerate(_) => CliError::Degenerate(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Model(m) => m.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<LocatorError> for CliError {
    fn from(e: LocatorError) -> Self {
        match e {
            LocatorError::IdenticallyZero => CliError::Degenerate(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::EpTooClose { .. } | TraceError::ContourNearEp { .. } => {
                CliError::EpProximity(e.to_string())
            }
            TraceError::NotClosed | TraceError::EndpointMismatch | TraceError::InvalidSubset(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
