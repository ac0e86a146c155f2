use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Matrix, NnError};
use crate::optim::ParamShape;
use crate::rng::{seeded, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    /// Derivative expressed through the activation's output `a`.
    /// The ReLU subgradient at 0 is 0.
    pub(crate) fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Identity => 1.0,
        }
    }
}

/// Applies an activation to one value. The sigmoid never evaluates `exp` of a
/// positive argument, so it cannot overflow.
pub fn activate(kind: Activation, x: f64) -> f64 {
    match kind {
        Activation::Relu => x.max(0.0),
        Activation::Sigmoid => {
            if x >= 0.0 {
                1.0 / (1.0 + (-x).exp())
            } else {
                let e = x.exp();
                e / (1.0 + e)
            }
        }
        Activation::Identity => x,
    }
}

/// Width and activation of one layer in an architecture description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub width: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub const fn new(width: usize, activation: Activation) -> Self {
        Self { width, activation }
    }
}

/// Fully connected layer; `weights` is `out_dim x in_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Vec<f64>, activation: Activation) -> Result<Self, NnError> {
        if bias.len() != weights.rows() {
            return Err(NnError::DimensionMismatch(format!(
                "bias of length {} for {} output units",
                bias.len(),
                weights.rows()
            )));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }
}

/// `activation(input · Wᵀ + b)` for an `N x in_dim` input.
pub fn dense_forward(layer: &DenseLayer, input: &Matrix) -> Result<Matrix, NnError> {
    if input.cols() != layer.in_dim() {
        return Err(NnError::DimensionMismatch(format!(
            "layer expects {} inputs, got {}",
            layer.in_dim(),
            input.cols()
        )));
    }
    let mut out = Matrix::zeros(input.rows(), layer.out_dim());
    for n in 0..input.rows() {
        let x = input.row(n);
        for (o, slot) in out.row_mut(n).iter_mut().enumerate() {
            let z = layer
                .weights
                .row(o)
                .iter()
                .zip(x)
                .fold(layer.bias[o], |acc, (w, v)| acc + w * v);
            *slot = activate(layer.activation, z);
        }
    }
    Ok(out)
}

/// Chain of dense layers ending in a single sigmoid unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<DenseLayer>,
    input_dim: usize,
}

impl Network {
    pub fn new(input_dim: usize, layers: Vec<DenseLayer>) -> Result<Self, NnError> {
        let last = layers
            .last()
            .ok_or_else(|| NnError::InvalidArchitecture("no layers".into()))?;
        if last.out_dim() != 1 || last.activation != Activation::Sigmoid {
            return Err(NnError::InvalidArchitecture(
                "final layer must be a single sigmoid unit".into(),
            ));
        }
        let mut width = input_dim;
        for (i, layer) in layers.iter().enumerate() {
            if layer.in_dim() != width {
                return Err(NnError::InvalidArchitecture(format!(
                    "layer {i} expects {} inputs but receives {width}",
                    layer.in_dim()
                )));
            }
            width = layer.out_dim();
        }
        Ok(Self { layers, input_dim })
    }

    /// Seeded initialization: He-uniform weights for ReLU layers,
    /// Glorot-uniform otherwise; zero biases.
    pub fn seeded(input_dim: usize, arch: &[LayerSpec], seed: u64) -> Result<Self, NnError> {
        let mut rng = seeded(seed, Stream::Init);
        let mut fan_in = input_dim;
        let mut layers = Vec::with_capacity(arch.len());
        for spec in arch {
            if spec.width == 0 {
                return Err(NnError::InvalidArchitecture("zero-width layer".into()));
            }
            let limit = match spec.activation {
                Activation::Relu => (6.0 / fan_in as f64).sqrt(),
                _ => (6.0 / (fan_in + spec.width) as f64).sqrt(),
            };
            let data = (0..spec.width * fan_in)
                .map(|_| rng.random_range(-limit..limit))
                .collect();
            layers.push(DenseLayer {
                weights: Matrix::new(spec.width, fan_in, data)?,
                bias: vec![0.0; spec.width],
                activation: spec.activation,
            });
            fan_in = spec.width;
        }
        Self::new(input_dim, layers)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    /// Parameter shapes in update order: W0, b0, W1, b1, ...
    pub fn param_shapes(&self) -> Vec<ParamShape> {
        self.layers
            .iter()
            .flat_map(|l| {
                [
                    ParamShape::new(l.out_dim(), l.in_dim()),
                    ParamShape::new(l.out_dim(), 1),
                ]
            })
            .collect()
    }

    /// Mutable parameter buffers in the order of [`Network::param_shapes`].
    pub fn params_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }

    pub fn params(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
            .collect()
    }

    /// Layer outputs for every layer, first to last, without clamping.
    pub(crate) fn activations(&self, inputs: &Matrix) -> Result<Vec<Matrix>, NnError> {
        if inputs.cols() != self.input_dim {
            return Err(NnError::DimensionMismatch(format!(
                "network expects {} features, got {}",
                self.input_dim,
                inputs.cols()
            )));
        }
        let mut outs: Vec<Matrix> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let next = dense_forward(layer, outs.last().unwrap_or(inputs))?;
            outs.push(next);
        }
        Ok(outs)
    }
}
