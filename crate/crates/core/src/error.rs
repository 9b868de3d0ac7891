use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected side {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian: relative defect {defect:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scheme mismatch: builder expects {expected}, got {actual}")]
    WrongScheme { expected: &'static str, actual: &'static str },

    #[error("unknown preset `{name}`; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("non-unique steady state: {0}")]
    NonUniqueSteadyState(String),

    #[error("integrator failed to meet tolerance: {what} (achieved {achieved:.3e}, required {required:.1e})")]
    IntegrationFailure { what: &'static str, achieved: f64, required: f64 },

    #[error("steady state did not converge within {max_time:.3e} s (residual {residual:.3e})")]
    NotConverged { max_time: f64, residual: f64 },

    #[error("negativity definitions disagree: trace-norm form {trace_norm_form:.15e}, eigenvalue form {eigen_form:.15e}")]
    InconsistentNegativity { trace_norm_form: f64, eigen_form: f64 },
}
