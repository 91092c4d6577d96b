use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A family parameter outside its admissible set.
    #[error("parameter {value} outside admissible domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("entry solve failed: {0}")]
    Solve(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A multi-start search ran out of starts without an accepted point.
    #[error("search failed after {starts} starts (best residual {best_residual:e})")]
    SearchFailure { starts: usize, best_residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
