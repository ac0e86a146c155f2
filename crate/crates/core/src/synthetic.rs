//! Seeded surrogate datasets in the canonical 13-feature schema.
//!
//! [`surrogate_dataset`] imitates a listener's like/dislike history over
//! tracks with realistic feature ranges: liked tracks lean danceable,
//! energetic, positive and less acoustic, and a small share of labels are
//! flipped to mimic inconsistent listening. [`separable_dataset`] labels
//! tracks purely by danceability with a clear margin.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::data::{Dataset, Label, TrackRecord, NUM_FEATURES};
use crate::rng::{seeded, Stream};

#[derive(Clone, Copy)]
enum Kind {
    Continuous,
    Integer,
}

struct FeatureModel {
    liked_mean: f64,
    disliked_mean: f64,
    sd: f64,
    lo: f64,
    hi: f64,
    kind: Kind,
}

const fn model(liked_mean: f64, disliked_mean: f64, sd: f64, lo: f64, hi: f64) -> FeatureModel {
    FeatureModel {
        liked_mean,
        disliked_mean,
        sd,
        lo,
        hi,
        kind: Kind::Continuous,
    }
}

const fn integer(liked_mean: f64, disliked_mean: f64, sd: f64, lo: f64, hi: f64) -> FeatureModel {
    FeatureModel {
        kind: Kind::Integer,
        ..model(liked_mean, disliked_mean, sd, lo, hi)
    }
}

// canonical feature order
const MODELS: [FeatureModel; NUM_FEATURES] = [
    model(0.15, 0.45, 0.2, 0.0, 1.0),                     // acousticness
    model(0.70, 0.52, 0.13, 0.0, 1.0),                    // danceability
    integer(230_000.0, 250_000.0, 55_000.0, 16_000.0, 1_000_000.0), // duration_ms
    model(0.72, 0.55, 0.18, 0.0, 1.0),                    // energy
    model(0.08, 0.25, 0.22, 0.0, 1.0),                    // instrumentalness
    integer(5.5, 5.0, 3.4, 0.0, 11.0),                    // key
    model(0.18, 0.20, 0.12, 0.0, 1.0),                    // liveness
    model(-6.5, -9.5, 3.2, -33.0, 0.0),                   // loudness
    integer(0.6, 0.65, 0.5, 0.0, 1.0),                    // mode
    model(0.12, 0.07, 0.08, 0.0, 1.0),                    // speechiness
    model(122.0, 117.0, 28.0, 50.0, 220.0),               // tempo
    integer(4.0, 3.9, 0.35, 3.0, 5.0),                    // time_signature
    model(0.56, 0.42, 0.2, 0.0, 1.0),                     // valence
];

/// Share of surrogate labels flipped after generation.
pub const LABEL_NOISE: f64 = 0.04;

fn draw(m: &FeatureModel, label: Label, rng: &mut impl Rng) -> f64 {
    let mean = match label {
        Label::Liked => m.liked_mean,
        Label::Disliked => m.disliked_mean,
    };
    let v = Normal::new(mean, m.sd)
        .expect("finite positive spread")
        .sample(rng)
        .clamp(m.lo, m.hi);
    match m.kind {
        Kind::Continuous => v,
        Kind::Integer => v.round(),
    }
}

/// `n` tracks with roughly balanced classes and class-dependent features.
pub fn surrogate_dataset(n: usize, seed: u64) -> Dataset {
    let mut rng = seeded(seed, Stream::Synthetic);
    let records = (0..n)
        .map(|i| {
            let label = if rng.random_bool(0.5) {
                Label::Liked
            } else {
                Label::Disliked
            };
            let mut features = [0.0; NUM_FEATURES];
            for (slot, m) in features.iter_mut().zip(&MODELS) {
                *slot = draw(m, label, &mut rng);
            }
            let history = if rng.random_bool(LABEL_NOISE) {
                label.flipped()
            } else {
                label
            };
            TrackRecord {
                track_id: format!("track{i:05}"),
                features,
                history,
            }
        })
        .collect();
    Dataset::new(records)
}

/// `n` tracks labeled liked exactly when danceability exceeds 0.5; no
/// danceability value falls within 0.1 of the boundary. Classes alternate so
/// both are always present.
pub fn separable_dataset(n: usize, seed: u64) -> Dataset {
    let mut rng = seeded(seed, Stream::Synthetic);
    let records = (0..n)
        .map(|i| {
            let liked = i % 2 == 0;
            let mut features = [0.0; NUM_FEATURES];
            for (slot, m) in features.iter_mut().zip(&MODELS) {
                let mid = 0.5 * (m.liked_mean + m.disliked_mean);
                *slot = rng.random_range(mid - m.sd..mid + m.sd).clamp(m.lo, m.hi);
            }
            let d: f64 = rng.random_range(0.0..0.4);
            features[1] = if liked { 0.6 + d } else { d };
            let history = if liked { Label::Liked } else { Label::Disliked };
            TrackRecord {
                track_id: format!("sep{i:03}"),
                features,
                history,
            }
        })
        .collect();
    Dataset::new(records)
}
