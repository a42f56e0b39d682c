use thiserror::Error;

/// Errors produced by the distribution kernels and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change found for the root search")]
    NoBracket,

    #[error("root search exceeded {0} iterations")]
    MaxIterExceeded(usize),

    #[error("moment of order {r} does not exist for shape {beta} (requires 0 < r < beta)")]
    MomentDoesNotExist { r: f64, beta: f64 },

    #[error("mean residual life is undefined for shape {beta} (requires beta > 1)")]
    MrlUndefined { beta: f64 },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("optimizer did not converge: {0}")]
    NotConverged(String),

    #[error("improper posterior: {0}")]
    ImproperPosterior(String),

    #[error("series has zero variance in a Geweke window")]
    DegenerateSeries,

    #[error("chain has no draws")]
    EmptyChain,

    #[error("empty input")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
