use super::{Batch, NnError};

/// Confusion counts for a like/dislike classifier.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn correct(&self) -> usize {
        self.tp + self.tn
    }
}

/// Tallies predictions against labels; `p >= threshold` counts as like.
pub fn classify_predictions(
    predictions: &[f64],
    labels: &[f64],
    threshold: f64,
) -> Result<ConfusionCounts, NnError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(NnError::BadThreshold(threshold));
    }
    if labels.is_empty() {
        return Err(NnError::EmptyBatch);
    }
    if predictions.len() != labels.len() {
        return Err(NnError::DimensionMismatch(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let mut c = ConfusionCounts::default();
    for (&p, &y) in predictions.iter().zip(labels) {
        match (p >= threshold, y == 1.0) {
            (true, true) => c.tp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

pub fn classify(batch: &Batch, threshold: f64) -> Result<ConfusionCounts, NnError> {
    let p = batch.predictions().ok_or(NnError::ForwardNotRun)?;
    classify_predictions(p, batch.labels(), threshold)
}

/// Percentage of correct predictions.
pub fn accuracy(c: &ConfusionCounts) -> Result<f64, NnError> {
    match c.total() {
        0 => Err(NnError::EmptyCounts),
        total => Ok((c.tn + c.tp) as f64 / total as f64 * 100.0),
    }
}
