use thiserror::Error;

/// Errors raised by the solvers, diagnostics and the batch front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("invalid initial data in cell {cell} (x = {x}): non-finite cell average")]
    InvalidInitialData { cell: usize, x: f64 },

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("flux evaluation produced a non-finite value at s = {s}")]
    FluxEvaluation { s: f64 },

    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },

    #[error("step rejected: tau = {tau} exceeds the admissible bound {bound}")]
    StepRejected { tau: f64, bound: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("singular tridiagonal system: zero pivot in row {row}")]
    SingularSystem { row: usize },

    #[error("undefined ratio: {0}")]
    UndefinedRatio(&'static str),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for failures of a time step (as opposed to configuration or I/O).
    pub fn is_step_failure(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::FluxEvaluation { .. }
                | Error::Quadrature { .. }
                | Error::StepRejected { .. }
                | Error::NewtonDiverged { .. }
                | Error::SingularSystem { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
