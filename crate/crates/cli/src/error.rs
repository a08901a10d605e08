use seirs::deterministic::IntegrationError;
use seirs::{DelayError, ModelError, SdeError, StabilityError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<IntegrationError> for CliError {
    fn from(e: IntegrationError) -> Self {
        match e {
            IntegrationError::InvalidParams(_)
            | IntegrationError::Model(_)
            | IntegrationError::StepMismatch { .. }
            | IntegrationError::DelayMismatch { .. }
            | IntegrationError::Precondition(_) => CliError::Validation(e.to_string()),
            IntegrationError::InvariantBreach { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SdeError> for CliError {
    fn from(e: SdeError) -> Self {
        match e {
            SdeError::Integration(inner) => inner.into(),
            SdeError::NoReplicas
            | SdeError::InvalidRhoGrid(_)
            | SdeError::NondelayedOnly { .. }
            | SdeError::ConditionFalse { .. } => CliError::Validation(e.to_string()),
            SdeError::Excursion { .. } | SdeError::InsufficientExceedances { .. } | SdeError::CertificateFailed => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<DelayError> for CliError {
    fn from(e: DelayError) -> Self {
        match e {
            DelayError::InvalidParams(_) | DelayError::NotBelowThreshold { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        CliError::Numerical(e.to_string())
    }
}
