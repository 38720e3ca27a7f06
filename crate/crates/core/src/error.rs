use thiserror::Error;

/// Errors surfaced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {error_estimate:.3e})")]
    QuadratureNonConvergence {
        subdivisions: usize,
        error_estimate: f64,
    },

    #[error("state is not normalizable: {0}")]
    NotNormalizable(String),

    #[error("grid too coarse: {points} points, need at least {min}")]
    GridTooCoarse { points: usize, min: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
