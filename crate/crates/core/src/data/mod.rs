//! Track dataset: ingestion, min-max scaling, analytics and splitting.

mod io;
mod scaler;
mod split;
mod stats;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{
    load_dataset, load_tracks, read_dataset, read_tracks, save_dataset, write_dataset,
    UnlabeledTrack,
};
pub use scaler::{apply_scaler, fit_scaler, inverse_scale, ScalerParams};
pub use split::split;
pub use stats::{
    class_conditional_summary, correlation_matrix, write_summary_csv, CorrelationMatrix,
    FeatureSummary,
};

/// Number of audio features per track.
pub const NUM_FEATURES: usize = 13;

/// Canonical feature order used everywhere a feature vector appears.
pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "acousticness",
    "danceability",
    "duration_ms",
    "energy",
    "instrumentalness",
    "key",
    "liveness",
    "loudness",
    "mode",
    "speechiness",
    "tempo",
    "time_signature",
    "valence",
];

/// Default name of the like/dislike column.
pub const DEFAULT_LABEL_COLUMN: &str = "History";

/// Name used for the label when it appears as an attribute (correlation output).
pub const LABEL_ATTRIBUTE: &str = "history";

pub type Features = [f64; NUM_FEATURES];

#[derive(Debug, Error)]
pub enum DataError {
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("row {row}: non-numeric value in column '{column}'")]
    NonNumericCell { row: usize, column: String },
    #[error("row {row}: label must be 0 or 1")]
    BadLabel { row: usize },
    #[error("dataset has no records")]
    EmptyDataset,
    #[error("dataset is already scaled")]
    AlreadyScaled,
    #[error("unknown feature '{0}'")]
    UnknownFeature(String),
    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error("train fraction {0} is not strictly between 0 and 1")]
    BadFraction(f64),
    #[error("feature {index} is not finite")]
    NonFiniteFeature { index: usize },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Binary like/dislike label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Disliked,
    Liked,
}

impl Label {
    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Label::Disliked),
            1 => Some(Label::Liked),
            _ => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Label::Disliked => 0.0,
            Label::Liked => 1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Disliked => Label::Liked,
            Label::Liked => Label::Disliked,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Disliked => "dislike",
            Label::Liked => "like",
        })
    }
}

/// One track: an identifier, 13 audio features in canonical order and the
/// listener's like/dislike history.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub track_id: String,
    pub features: Features,
    pub history: Label,
}

impl TrackRecord {
    pub fn new(
        track_id: impl Into<String>,
        features: Features,
        history: Label,
    ) -> Result<Self, DataError> {
        check_finite(&features)?;
        Ok(Self {
            track_id: track_id.into(),
            features,
            history,
        })
    }
}

pub(crate) fn check_finite(features: &Features) -> Result<(), DataError> {
    match features.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(DataError::NonFiniteFeature { index }),
        None => Ok(()),
    }
}

/// An ordered collection of tracks sharing the canonical feature order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<TrackRecord>,
    scaled: bool,
}

impl Dataset {
    /// Wraps unscaled records.
    pub fn new(records: Vec<TrackRecord>) -> Self {
        Self {
            records,
            scaled: false,
        }
    }

    pub(crate) fn with_scaled(records: Vec<TrackRecord>, scaled: bool) -> Self {
        Self { records, scaled }
    }

    pub fn records(&self) -> &[TrackRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<TrackRecord> {
        self.records
    }

    pub fn feature_names(&self) -> [&'static str; NUM_FEATURES] {
        FEATURE_NAMES
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of liked and disliked records, in that order.
    pub fn class_counts(&self) -> (usize, usize) {
        let liked = self
            .records
            .iter()
            .filter(|r| r.history == Label::Liked)
            .count();
        (liked, self.records.len() - liked)
    }

    /// Same records with every label inverted.
    pub fn with_flipped_labels(&self) -> Self {
        let records = self
            .records
            .iter()
            .map(|r| TrackRecord {
                history: r.history.flipped(),
                ..r.clone()
            })
            .collect();
        Self::with_scaled(records, self.scaled)
    }
}

/// Position of a feature in the canonical order, matched case-insensitively.
pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES
        .iter()
        .position(|f| f.eq_ignore_ascii_case(name.trim()))
}
