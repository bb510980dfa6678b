use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A curvature evaluation was requested outside the positive cone.
    #[error("outside the positive cone: smallest entry {min_value:e}")]
    Domain { min_value: f64 },

    #[error("inconsistent curvature function: {0}")]
    Inconsistency(String),

    #[error("evaluation failed at {sample:?}: {reason}")]
    Evaluation { sample: Vec<f64>, reason: String },

    /// A surface node left the admissible (locally strictly convex) region.
    #[error("node {node} is not admissible (smallest principal curvature {min_eigenvalue:e})")]
    Admissibility { node: usize, min_eigenvalue: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no solution: {0}")]
    NonExistence(String),

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
