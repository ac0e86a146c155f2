//! Dense feedforward classifier with hand-derived gradients.

mod layer;
mod loss;
mod matrix;
mod metrics;

use thiserror::Error;

pub use layer::{activate, dense_forward, Activation, DenseLayer, LayerSpec, Network};
pub use loss::{backward, bce, bce_loss, forward, Batch, Gradients, LayerGradient, PROB_CLAMP};
pub use matrix::{matmul, Matrix};
pub use metrics::{accuracy, classify, classify_predictions, ConfusionCounts};

#[derive(Debug, Error, PartialEq)]
pub enum NnError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("batch is empty")]
    EmptyBatch,
    #[error("forward pass has not been run on this batch")]
    ForwardNotRun,
    #[error("label {0} is not 0 or 1")]
    BadLabel(f64),
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("confusion counts are empty")]
    EmptyCounts,
    #[error("threshold {0} is not strictly between 0 and 1")]
    BadThreshold(f64),
}
