use super::{Activation, Matrix, Network, NnError};
use crate::data::Dataset;

/// Predictions are kept inside `[PROB_CLAMP, 1 - PROB_CLAMP]` so the
/// cross-entropy stays finite.
pub const PROB_CLAMP: f64 = 1e-7;

/// Inputs, binary labels and (after [`forward`]) predictions for N examples.
#[derive(Debug, Clone)]
pub struct Batch {
    inputs: Matrix,
    labels: Vec<f64>,
    predictions: Option<Vec<f64>>,
    // raw per-layer outputs from the last forward pass
    trace: Option<Vec<Matrix>>,
}

impl Batch {
    pub fn new(inputs: Matrix, labels: Vec<f64>) -> Result<Self, NnError> {
        if labels.is_empty() || inputs.rows() == 0 {
            return Err(NnError::EmptyBatch);
        }
        if labels.len() != inputs.rows() {
            return Err(NnError::DimensionMismatch(format!(
                "{} input rows but {} labels",
                inputs.rows(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y != 0.0 && y != 1.0) {
            return Err(NnError::BadLabel(bad));
        }
        Ok(Self {
            inputs,
            labels,
            predictions: None,
            trace: None,
        })
    }

    /// Batch over every record of a dataset, features as given.
    pub fn from_dataset(ds: &Dataset) -> Result<Self, NnError> {
        let rows: Vec<&[f64]> = ds.records().iter().map(|r| &r.features[..]).collect();
        let labels = ds.records().iter().map(|r| r.history.as_f64()).collect();
        Self::new(Matrix::from_rows(&rows)?, labels)
    }

    /// Batch over a subset of records.
    pub(crate) fn from_indices(ds: &Dataset, idx: &[usize]) -> Result<Self, NnError> {
        let records = ds.records();
        let rows: Vec<&[f64]> = idx.iter().map(|&i| &records[i].features[..]).collect();
        let labels = idx.iter().map(|&i| records[i].history.as_f64()).collect();
        Self::new(Matrix::from_rows(&rows)?, labels)
    }

    /// Replaces the predictions directly, clamping them into the open unit interval.
    pub fn with_predictions(mut self, p: Vec<f64>) -> Result<Self, NnError> {
        if p.len() != self.labels.len() {
            return Err(NnError::DimensionMismatch(format!(
                "{} predictions for {} labels",
                p.len(),
                self.labels.len()
            )));
        }
        self.predictions = Some(p.into_iter().map(clamp_probability).collect());
        self.trace = None;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn predictions(&self) -> Option<&[f64]> {
        self.predictions.as_deref()
    }
}

fn clamp_probability(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// Runs the network over the batch, stores clamped predictions and returns them.
pub fn forward<'b>(net: &Network, batch: &'b mut Batch) -> Result<&'b [f64], NnError> {
    let trace = net.activations(&batch.inputs)?;
    let out = trace.last().expect("network has at least one layer");
    batch.predictions = Some(out.as_slice().iter().copied().map(clamp_probability).collect());
    batch.trace = Some(trace);
    Ok(batch.predictions.as_deref().unwrap_or_default())
}

impl Network {
    /// Clamped like-probabilities for each row of `inputs`.
    pub fn predict(&self, inputs: &Matrix) -> Result<Vec<f64>, NnError> {
        let trace = self.activations(inputs)?;
        let out = trace.last().expect("network has at least one layer");
        Ok(out.as_slice().iter().copied().map(clamp_probability).collect())
    }
}

/// Mean binary cross-entropy of predictions against labels.
pub fn bce(predictions: &[f64], labels: &[f64]) -> Result<f64, NnError> {
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
    let total: f64 = predictions
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = clamp_probability(p);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    Ok(total / labels.len() as f64)
}

pub fn bce_loss(batch: &Batch) -> Result<f64, NnError> {
    let p = batch.predictions().ok_or(NnError::ForwardNotRun)?;
    bce(p, &batch.labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Loss gradients for every layer, shaped like the network's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    /// Flat buffers in the order of [`Network::param_shapes`].
    pub fn as_slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|g| [g.weights.as_slice(), g.bias.as_slice()])
            .collect()
    }
}

/// Reverse-mode gradients of the mean cross-entropy with respect to every
/// weight and bias. Uses the layer outputs recorded by the last [`forward`]
/// on this batch. The output pre-activation gradient is `(p - y) / N` with the
/// unclamped sigmoid output `p`.
pub fn backward(net: &Network, batch: &Batch) -> Result<Gradients, NnError> {
    let trace = batch.trace.as_ref().ok_or(NnError::ForwardNotRun)?;
    let layers = net.layers();
    if trace.len() != layers.len()
        || trace
            .iter()
            .zip(layers)
            .any(|(a, l)| a.cols() != l.out_dim() || a.rows() != batch.len())
    {
        return Err(NnError::ForwardNotRun);
    }

    let n = batch.len();
    let inv_n = 1.0 / n as f64;
    let output = &trace[trace.len() - 1];
    debug_assert_eq!(layers[layers.len() - 1].activation, Activation::Sigmoid);
    // delta holds dLoss/dz for the current layer, N x out_dim
    let mut delta = Matrix::new(
        n,
        1,
        output
            .as_slice()
            .iter()
            .zip(&batch.labels)
            .map(|(p, y)| (p - y) * inv_n)
            .collect(),
    )?;

    let mut grads = Vec::with_capacity(layers.len());
    for l in (0..layers.len()).rev() {
        let layer = &layers[l];
        let input = if l == 0 { &batch.inputs } else { &trace[l - 1] };
        let (out_dim, in_dim) = (layer.out_dim(), layer.in_dim());

        let mut dw = Matrix::zeros(out_dim, in_dim);
        let mut db = vec![0.0; out_dim];
        for s in 0..n {
            let d_row = delta.row(s);
            let x_row = input.row(s);
            for (o, &d) in d_row.iter().enumerate() {
                db[o] += d;
                for (g, &x) in dw.row_mut(o).iter_mut().zip(x_row) {
                    *g += d * x;
                }
            }
        }

        if l > 0 {
            let prev_act = layers[l - 1].activation;
            let mut prev = Matrix::zeros(n, in_dim);
            for s in 0..n {
                let d_row = delta.row(s);
                let a_row = input.row(s);
                for (i, slot) in prev.row_mut(s).iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (o, &d) in d_row.iter().enumerate() {
                        acc += d * layer.weights.get(o, i);
                    }
                    *slot = acc * prev_act.derivative_from_output(a_row[i]);
                }
            }
            delta = prev;
        }
        grads.push(LayerGradient {
            weights: dw,
            bias: db,
        });
    }
    grads.reverse();
    Ok(Gradients { layers: grads })
}
