//! Hybrid music-likeability engine.
//!
//! The content side trains a small dense classifier on per-track audio
//! features and predicts whether a listener will like a track. The
//! collaborative side scores tracks from the ratings of users whose tastes
//! correlate with the active user. [`collab::hybrid_score`] blends the two.
//!
//! Module map:
//!
//! * [`data`]: CSV ingestion, min-max scaling, correlation analytics, stratified splits.
//! * [`nn`]: dense layers, forward/backward passes, binary cross-entropy, metrics.
//! * [`optim`]: Adam updates.
//! * [`train`]: the training loop, evaluation and model persistence.
//! * [`collab`]: Pearson user similarity, neighborhoods and rating prediction.
//! * [`synthetic`]: seeded surrogate datasets with the canonical 13-feature schema.

pub mod collab;
pub mod data;
pub mod nn;
pub mod optim;
mod rng;
pub mod synthetic;
pub mod train;

pub use collab::{hybrid_score, CollabError, RatingMatrix, SimilarityScore};
pub use data::{
    CorrelationMatrix, DataError, Dataset, Label, ScalerParams, TrackRecord, FEATURE_NAMES,
    NUM_FEATURES,
};
pub use nn::{Activation, Batch, ConfusionCounts, DenseLayer, Matrix, Network, NnError};
pub use optim::{AdamConfig, AdamState, OptimError};
pub use train::{EpochMetrics, TrainConfig, TrainError, TrainedModel};
