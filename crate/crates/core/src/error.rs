use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("hyperparameter `{name}` = {value} violates constraint {constraint}")]
    Constraint {
        name: &'static str,
        value: f64,
        constraint: String,
    },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("trust region exhausted: every point within radius {radius} has been observed")]
    Exhausted { radius: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
