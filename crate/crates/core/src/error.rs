use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid replacement pattern: {0}")]
    Pattern(String),

    #[error("invalid fitness configuration: {0}")]
    Config(String),

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("{solver} did not converge after {iterations} iterations (last change {last_change:.3e}, tolerance {tol:.3e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        last_change: f64,
        tol: f64,
    },

    #[error("step refinement disagreement {difference:.3e} exceeds tolerance {tol:.3e}")]
    Refinement { difference: f64, tol: f64 },

    #[error("density vanishes at the requested configuration")]
    ZeroDensity,

    #[error("degenerate estimate: {0}")]
    Degenerate(String),

    #[error("density provider has no envelope bound")]
    MissingBound,

    #[error("rejection sampler gave up after {proposals} proposals without acceptance")]
    Rejection { proposals: u64 },

    #[error("envelope bound {bound} violated by density value {value}")]
    EnvelopeViolated { bound: f64, value: f64 },

    #[error("negative density {value:.3e} at node ({i}, {j})")]
    Negative { value: f64, i: usize, j: usize },

    #[error("mismatched grids: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("empty statistics")]
    EmptyStats,

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
