//! Training loop, evaluation, prediction and model persistence.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{
    apply_scaler, fit_scaler, split, DataError, Dataset, Label, ScalerParams, FEATURE_NAMES,
    NUM_FEATURES,
};
use crate::nn::{
    accuracy, backward, bce_loss, classify, forward, Activation, Batch, ConfusionCounts,
    DenseLayer, LayerSpec, Matrix, Network, NnError,
};
use crate::optim::{AdamConfig, AdamState, OptimError};
use crate::rng::{seeded, Stream};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error("training data contains only one class")]
    SingleClassDataset,
    #[error("bad training configuration: {0}")]
    BadConfig(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("model json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub adam: AdamConfig,
    /// Layers after the 13 inputs; the last entry must be `(1, sigmoid)`.
    pub architecture: Vec<LayerSpec>,
    pub train_fraction: f64,
    pub threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 32,
            seed: 0,
            adam: AdamConfig::default(),
            architecture: vec![
                LayerSpec::new(64, Activation::Relu),
                LayerSpec::new(32, Activation::Relu),
                LayerSpec::new(1, Activation::Sigmoid),
            ],
            train_fraction: 0.8,
            threshold: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.batch_size == 0 {
            return Err(TrainError::BadConfig("batch size must be at least 1".into()));
        }
        match self.architecture.last() {
            Some(l) if l.width == 1 && l.activation == Activation::Sigmoid => {}
            _ => {
                return Err(TrainError::BadConfig(
                    "architecture must end with a single sigmoid unit".into(),
                ))
            }
        }
        if self.architecture.iter().any(|l| l.width == 0) {
            return Err(TrainError::BadConfig("zero-width layer".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(TrainError::BadConfig(format!(
                "train fraction {} must lie in (0, 1)",
                self.train_fraction
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(TrainError::BadConfig(format!(
                "threshold {} must lie in (0, 1)",
                self.threshold
            )));
        }
        self.adam
            .validate()
            .map_err(|e| TrainError::BadConfig(e.to_string()))
    }

    /// The network a run with this configuration starts from.
    pub fn initial_network(&self) -> Result<Network, TrainError> {
        Ok(Network::seeded(NUM_FEATURES, &self.architecture, self.seed)?)
    }
}

/// Full-partition metrics at the end of one epoch (epochs count from 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_accuracy: f64,
    pub train_loss: f64,
    pub val_accuracy: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub network: Network,
    pub scaler: ScalerParams,
    pub config: TrainConfig,
    pub feature_names: Vec<String>,
    pub format_version: u32,
}

/// Accuracy (percent), mean cross-entropy and the underlying counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub loss: f64,
    pub counts: ConfusionCounts,
}

fn score(net: &Network, batch: &mut Batch, threshold: f64) -> Result<Evaluation, TrainError> {
    forward(net, batch)?;
    let counts = classify(batch, threshold)?;
    Ok(Evaluation {
        accuracy: accuracy(&counts)?,
        loss: bce_loss(batch)?,
        counts,
    })
}

/// Trains a fresh network.
///
/// The dataset is split with [`split`] using `cfg.seed`; the scaler is fitted
/// on the train partition only and applied to both. Each epoch visits the
/// train partition in seeded random mini-batches, then scores both partitions
/// in full.
pub fn train(
    cfg: &TrainConfig,
    ds: &Dataset,
) -> Result<(TrainedModel, Vec<EpochMetrics>), TrainError> {
    cfg.validate()?;
    if ds.is_empty() {
        return Err(DataError::EmptyDataset.into());
    }
    if ds.is_scaled() {
        return Err(DataError::AlreadyScaled.into());
    }
    let (liked, disliked) = ds.class_counts();
    if liked == 0 || disliked == 0 {
        return Err(TrainError::SingleClassDataset);
    }

    let (train_raw, val_raw) = split(ds, cfg.train_fraction, cfg.seed)?;
    let scaler = fit_scaler(&train_raw)?;
    let train_set = apply_scaler(&scaler, &train_raw)?;
    let val_set = apply_scaler(&scaler, &val_raw)?;

    let mut network = cfg.initial_network()?;
    let mut adam = AdamState::new(&network.param_shapes())?;
    let mut rng = seeded(cfg.seed, Stream::Shuffle);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut train_full = Batch::from_dataset(&train_set)?;
    let mut val_full = Batch::from_dataset(&val_set)?;

    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let mut batch = Batch::from_indices(&train_set, chunk)?;
            forward(&network, &mut batch)?;
            let grads = backward(&network, &batch)?;
            adam.step(&cfg.adam, &mut network.params_mut(), &grads.as_slices())?;
        }
        let tr = score(&network, &mut train_full, cfg.threshold)?;
        let va = score(&network, &mut val_full, cfg.threshold)?;
        history.push(EpochMetrics {
            epoch,
            train_accuracy: tr.accuracy,
            train_loss: tr.loss,
            val_accuracy: va.accuracy,
            val_loss: va.loss,
        });
    }

    let model = TrainedModel {
        network,
        scaler,
        config: cfg.clone(),
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        format_version: FORMAT_VERSION,
    };
    Ok((model, history))
}

impl TrainedModel {
    fn check_schema(&self) -> Result<(), TrainError> {
        let canonical = FEATURE_NAMES
            .iter()
            .zip(&self.feature_names)
            .all(|(a, b)| a.eq_ignore_ascii_case(b));
        if self.feature_names.len() != NUM_FEATURES || !canonical {
            return Err(TrainError::SchemaMismatch(format!(
                "model features [{}] differ from [{}]",
                self.feature_names.join(", "),
                FEATURE_NAMES.join(", ")
            )));
        }
        Ok(())
    }
}

/// Scores a dataset. Unscaled data is scaled with the model's scaler first;
/// scaled data is assumed to have been scaled with it already.
pub fn evaluate(model: &TrainedModel, ds: &Dataset) -> Result<Evaluation, TrainError> {
    model.check_schema()?;
    let scaled = if ds.is_scaled() {
        ds.clone()
    } else {
        apply_scaler(&model.scaler, ds)?
    };
    let mut batch = Batch::from_dataset(&scaled)?;
    score(&model.network, &mut batch, model.config.threshold)
}

/// Like-probability and thresholded label for one track's raw features, in
/// the model's feature order.
pub fn predict(model: &TrainedModel, features: &[f64]) -> Result<(f64, Label), TrainError> {
    model.check_schema()?;
    let features: &[f64; NUM_FEATURES] = features.try_into().map_err(|_| {
        TrainError::SchemaMismatch(format!(
            "expected {NUM_FEATURES} features, got {}",
            features.len()
        ))
    })?;
    crate::data::check_finite(features)?;
    let scaled = model.scaler.scale(features);
    let inputs = Matrix::new(1, NUM_FEATURES, scaled.to_vec())?;
    let p = model.network.predict(&inputs)?[0];
    let label = if p >= model.config.threshold {
        Label::Liked
    } else {
        Label::Disliked
    };
    Ok((p, label))
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
    activation: Activation,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    feature_names: Vec<String>,
    scaler: ScalerParams,
    layers: Vec<LayerFile>,
    config: TrainConfig,
}

/// Versioned JSON document for a model; floats use shortest round-trip form.
pub fn model_to_json(model: &TrainedModel) -> Result<String, TrainError> {
    let file = ModelFile {
        format_version: model.format_version,
        feature_names: model.feature_names.clone(),
        scaler: model.scaler.clone(),
        layers: model
            .network
            .layers()
            .iter()
            .map(|l| LayerFile {
                rows: l.weights.rows(),
                cols: l.weights.cols(),
                weights: l.weights.as_slice().to_vec(),
                bias: l.bias.clone(),
                activation: l.activation,
            })
            .collect(),
        config: model.config.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    Ok(text)
}

pub fn model_from_json(text: &str) -> Result<TrainedModel, TrainError> {
    let file: ModelFile = serde_json::from_str(text)?;
    if file.format_version != FORMAT_VERSION {
        return Err(TrainError::UnsupportedVersion(file.format_version));
    }
    let layers = file
        .layers
        .into_iter()
        .map(|l| DenseLayer::new(Matrix::new(l.rows, l.cols, l.weights)?, l.bias, l.activation))
        .collect::<Result<Vec<_>, _>>()?;
    let network = Network::new(NUM_FEATURES, layers)?;
    if file
        .scaler
        .mins
        .iter()
        .zip(&file.scaler.maxs)
        .any(|(lo, hi)| lo.partial_cmp(hi).is_none_or(|o| o.is_gt()))
    {
        return Err(TrainError::SchemaMismatch(
            "scaler minimum exceeds maximum".into(),
        ));
    }
    let model = TrainedModel {
        network,
        scaler: file.scaler,
        config: file.config,
        feature_names: file.feature_names,
        format_version: file.format_version,
    };
    model.check_schema()?;
    Ok(model)
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<(), TrainError> {
    let path = path.as_ref();
    let text = model_to_json(model)?;
    fs::write(path, text).map_err(|source| TrainError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel, TrainError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| TrainError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    model_from_json(&text)
}

/// Metrics CSV with header `epoch,train_accuracy,train_loss,val_accuracy,val_loss`.
pub fn write_metrics_csv<W: Write>(metrics: &[EpochMetrics], mut w: W) -> std::io::Result<()> {
    writeln!(w, "epoch,train_accuracy,train_loss,val_accuracy,val_loss")?;
    for m in metrics {
        writeln!(
            w,
            "{},{},{},{},{}",
            m.epoch, m.train_accuracy, m.train_loss, m.val_accuracy, m.val_loss
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::TrackRecord;

    fn tiny_dataset() -> Dataset {
        let records = (0..12)
            .map(|i| {
                let mut f = [0.0; NUM_FEATURES];
                for (k, v) in f.iter_mut().enumerate() {
                    *v = ((i * 7 + k * 3) % 11) as f64;
                }
                let label = if f[0] > 5.0 { Label::Liked } else { Label::Disliked };
                TrackRecord::new(format!("t{i}"), f, label).unwrap()
            })
            .collect();
        Dataset::new(records)
    }

    fn small_config() -> TrainConfig {
        TrainConfig {
            epochs: 5,
            batch_size: 4,
            seed: 3,
            architecture: vec![
                LayerSpec::new(4, Activation::Relu),
                LayerSpec::new(1, Activation::Sigmoid),
            ],
            ..TrainConfig::default()
        }
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let cfg = TrainConfig {
            epochs: 0,
            ..small_config()
        };
        let (model, metrics) = train(&cfg, &tiny_dataset()).unwrap();
        assert!(metrics.is_empty());
        assert_eq!(model.network, cfg.initial_network().unwrap());
        assert_eq!(model.format_version, 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let ds = tiny_dataset();
        let one_class = Dataset::new(
            ds.records()
                .iter()
                .filter(|r| r.history == Label::Liked)
                .cloned()
                .collect(),
        );
        assert!(matches!(
            train(&small_config(), &one_class),
            Err(TrainError::SingleClassDataset)
        ));
        for cfg in [
            TrainConfig { batch_size: 0, ..small_config() },
            TrainConfig { threshold: 1.0, ..small_config() },
            TrainConfig { train_fraction: 0.0, ..small_config() },
            TrainConfig { architecture: vec![LayerSpec::new(2, Activation::Relu)], ..small_config() },
        ] {
            assert!(matches!(train(&cfg, &ds), Err(TrainError::BadConfig(_))));
        }
    }

    #[test]
    fn metrics_are_well_formed() {
        let (_, metrics) = train(&small_config(), &tiny_dataset()).unwrap();
        assert_eq!(metrics.len(), 5);
        for (i, m) in metrics.iter().enumerate() {
            assert_eq!(m.epoch, i + 1);
            assert!((0.0..=100.0).contains(&m.train_accuracy));
            assert!((0.0..=100.0).contains(&m.val_accuracy));
            assert!(m.train_loss >= 0.0 && m.val_loss >= 0.0);
        }
        let mut out = Vec::new();
        write_metrics_csv(&metrics, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("epoch,train_accuracy,train_loss,val_accuracy,val_loss\n1,"));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let (model, _) = train(&small_config(), &tiny_dataset()).unwrap();
        let text = model_to_json(&model).unwrap();
        assert!(text.contains("\"format_version\": 1"));
        let back = model_from_json(&text).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn schema_and_version_checks() {
        let (model, _) = train(&small_config(), &tiny_dataset()).unwrap();
        let text = model_to_json(&model).unwrap();
        let bumped = text.replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(matches!(
            model_from_json(&bumped),
            Err(TrainError::UnsupportedVersion(2))
        ));
        let renamed = text.replace("\"tempo\"", "\"bpm\"");
        assert!(matches!(
            model_from_json(&renamed),
            Err(TrainError::SchemaMismatch(_))
        ));
        assert!(matches!(
            predict(&model, &[0.0; 12]),
            Err(TrainError::SchemaMismatch(_))
        ));
        let mut swapped = model.clone();
        swapped.feature_names.swap(0, 1);
        assert!(matches!(
            evaluate(&swapped, &tiny_dataset()),
            Err(TrainError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn zero_weight_model_predicts_like_on_tie() {
        let (mut model, _) = train(&small_config(), &tiny_dataset()).unwrap();
        for p in model.network.params_mut() {
            p.fill(0.0);
        }
        let (p, label) = predict(&model, &[3.0; NUM_FEATURES]).unwrap();
        assert_eq!(p, 0.5);
        assert_eq!(label, Label::Liked);
    }

    #[test]
    fn out_of_range_features_are_clamped() {
        let (model, _) = train(&small_config(), &tiny_dataset()).unwrap();
        let (p, _) = predict(&model, &[1e9; NUM_FEATURES]).unwrap();
        let (q, _) = predict(&model, &model.scaler.maxs.clone()).unwrap();
        assert!(p > 0.0 && p < 1.0);
        assert_eq!(p, q);
    }
}
