use serde::{Deserialize, Serialize};

use super::{feature_index, DataError, Dataset, Features, TrackRecord, NUM_FEATURES};

/// Per-feature extremes observed when fitting, in canonical feature order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mins: Features,
    pub maxs: Features,
}

impl ScalerParams {
    /// Maps one feature vector onto [0, 1]. Degenerate features (min == max)
    /// map to 0; values outside the fitted range are clamped.
    pub fn scale(&self, features: &Features) -> Features {
        let mut out = [0.0; NUM_FEATURES];
        for (i, slot) in out.iter_mut().enumerate() {
            let (lo, hi) = (self.mins[i], self.maxs[i]);
            *slot = if hi > lo {
                ((features[i] - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
        out
    }
}

pub fn fit_scaler(ds: &Dataset) -> Result<ScalerParams, DataError> {
    if ds.is_scaled() {
        return Err(DataError::AlreadyScaled);
    }
    let first = ds.records().first().ok_or(DataError::EmptyDataset)?;
    let mut params = ScalerParams {
        mins: first.features,
        maxs: first.features,
    };
    for r in &ds.records()[1..] {
        for (i, &v) in r.features.iter().enumerate() {
            params.mins[i] = params.mins[i].min(v);
            params.maxs[i] = params.maxs[i].max(v);
        }
    }
    Ok(params)
}

pub fn apply_scaler(params: &ScalerParams, ds: &Dataset) -> Result<Dataset, DataError> {
    if ds.is_scaled() {
        return Err(DataError::AlreadyScaled);
    }
    let records = ds
        .records()
        .iter()
        .map(|r| TrackRecord {
            track_id: r.track_id.clone(),
            features: params.scale(&r.features),
            history: r.history,
        })
        .collect();
    Ok(Dataset::with_scaled(records, true))
}

/// Maps a scaled value back to the original units of `feature`.
pub fn inverse_scale(params: &ScalerParams, value: f64, feature: &str) -> Result<f64, DataError> {
    let i = feature_index(feature).ok_or_else(|| DataError::UnknownFeature(feature.to_string()))?;
    Ok(value * (params.maxs[i] - params.mins[i]) + params.mins[i])
}
