use thiserror::Error;

/// Errors raised by the library.
///
/// Infinite bulk energy is deliberately *not* an error: evaluators return
/// `f64::INFINITY` so that minimizers can reject those states uniformly.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate {dim}-simplex {vertices:?}: measure {measure:e}")]
    DegenerateSimplex {
        dim: usize,
        vertices: Vec<usize>,
        measure: f64,
    },
    #[error("unknown {what} id {id}")]
    IdError { what: &'static str, id: usize },
    #[error("dimension mismatch: {0}")]
    DimensionError(String),
    #[error("missing curvature field for the {0}-varifold")]
    MissingCurvature(usize),
    #[error("mesh mismatch: {0}")]
    MeshError(String),
    #[error("step {step} failed: {reason}")]
    StepFailure { step: usize, reason: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
