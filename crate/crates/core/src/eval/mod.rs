//! Evaluation: disparity metrics, plane-fit RMS and raster file formats.

mod metrics;
pub mod netpbm;
mod plane;

use thiserror::Error;

pub use metrics::{compute_metrics, MetricsReport};
pub use netpbm::FormatError;
pub use plane::{plane_fit_rms, PlaneFit};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("no evaluable pixels")]
    NothingToEvaluate,
    #[error("degenerate point set: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}
