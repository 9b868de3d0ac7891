use thiserror::Error;

use rydpump::Error as CoreError;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    InvalidSpec { field: String, message: String },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::InvalidSpec { field: field.into(), message: message.into() }
    }

    /// 0 success, 2 invalid spec, 3 numerical failure, 4 non-unique steady state.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidSpec { .. } | CliError::Io { .. } => 2,
            CliError::Output(_) => 3,
            CliError::Core(e) => match e {
                CoreError::NonUniqueSteadyState(_) => 4,
                CoreError::InvalidArgument(_)
                | CoreError::UnknownPreset { .. }
                | CoreError::UnknownState(_)
                | CoreError::WrongScheme { .. }
                | CoreError::NotDensityMatrix(_)
                | CoreError::DimensionMismatch { .. } => 2,
                CoreError::NotHermitian { .. }
                | CoreError::IntegrationFailure { .. }
                | CoreError::NotConverged { .. }
                | CoreError::InconsistentNegativity { .. } => 3,
            },
        }
    }
}
