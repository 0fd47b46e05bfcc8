use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("field shape mismatch: {0}")]
    Shape(String),

    #[error("loop rejected: {0}")]
    Loop(String),

    #[error("linear solve did not converge: residual {residual:e} after {iterations} iterations (tolerance {tolerance:e})")]
    NoConvergence {
        residual: f64,
        iterations: usize,
        tolerance: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures map to exit code 3, everything caused by user input to 2.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. } => true,
            Error::AtStep { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
