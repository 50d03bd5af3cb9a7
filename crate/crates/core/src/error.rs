//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("invalid re-centering request: {0}")]
    InvalidRecentering(String),
    #[error("insufficient jet order: {0}")]
    InsufficientOrder(String),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("invalid dimension: {0}")]
    Dimension(String),
    #[error("ambiguity not determined: {0}")]
    AmbiguityNotDetermined(String),
    #[error("singular linear system at order {order}: {msg}")]
    SingularSystem { order: usize, msg: String },
    #[error("input tractor is not parallel: {0}")]
    NotParallel(String),
    #[error("input metric is not Einstein: {0}")]
    NotEinstein(String),
    #[error("input metric is not adapted to the distribution: {0}")]
    NotAdapted(String),
    #[error("value not representable exactly: {0}")]
    Inexact(String),
    #[error("splitting scale mismatch: {0}")]
    ScaleMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
