//! Adam updates with per-parameter adaptive step sizes.
//!
//! The update keeps exponential moving averages of each gradient entry
//! (`m0`) and of its square (`m1`) and moves the parameter by
//! `lr * m0 / sqrt(m1 + eps)`. The stabilizer sits inside the square root.
//! Bias correction of both moments is optional and off by default.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OptimError {
    #[error("parameter {index}: shape mismatch ({detail})")]
    ShapeMismatch { index: usize, detail: String },
    #[error("parameter {index}: gradient entry {entry} is not finite")]
    NonFiniteGradient { index: usize, entry: usize },
    #[error("no parameters to optimize")]
    NoParameters,
    #[error("invalid Adam configuration: {0}")]
    InvalidConfig(String),
}

/// Shape of one parameter tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamShape {
    pub rows: usize,
    pub cols: usize,
}

impl ParamShape {
    pub const fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }

    pub const fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub bias_correction: bool,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            bias_correction: false,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<(), OptimError> {
        let in_unit = |b: f64| b > 0.0 && b < 1.0;
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(OptimError::InvalidConfig(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if !in_unit(self.beta1) || !in_unit(self.beta2) {
            return Err(OptimError::InvalidConfig(format!(
                "decay rates ({}, {}) must lie in (0, 1)",
                self.beta1, self.beta2
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(OptimError::InvalidConfig(format!(
                "epsilon {} must be positive",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// First and second moment buffers plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    shapes: Vec<ParamShape>,
    m0: Vec<Vec<f64>>,
    m1: Vec<Vec<f64>>,
    t: u64,
}

impl AdamState {
    pub fn new(shapes: &[ParamShape]) -> Result<Self, OptimError> {
        if shapes.is_empty() {
            return Err(OptimError::NoParameters);
        }
        let zeros = || shapes.iter().map(|s| vec![0.0; s.len()]).collect();
        Ok(Self {
            shapes: shapes.to_vec(),
            m0: zeros(),
            m1: zeros(),
            t: 0,
        })
    }

    pub fn shapes(&self) -> &[ParamShape] {
        &self.shapes
    }

    pub fn first_moment(&self) -> &[Vec<f64>] {
        &self.m0
    }

    pub fn second_moment(&self) -> &[Vec<f64>] {
        &self.m1
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One Adam update of `params` in place. Nothing is modified if any
    /// check fails.
    pub fn step(
        &mut self,
        cfg: &AdamConfig,
        params: &mut [&mut [f64]],
        grads: &[&[f64]],
    ) -> Result<(), OptimError> {
        if params.len() != self.shapes.len() || grads.len() != self.shapes.len() {
            return Err(OptimError::ShapeMismatch {
                index: params.len().min(grads.len()),
                detail: format!(
                    "{} parameters and {} gradients for {} tracked tensors",
                    params.len(),
                    grads.len(),
                    self.shapes.len()
                ),
            });
        }
        for (index, ((p, g), shape)) in params.iter().zip(grads).zip(&self.shapes).enumerate() {
            if p.len() != shape.len() || g.len() != shape.len() {
                return Err(OptimError::ShapeMismatch {
                    index,
                    detail: format!(
                        "expected {} entries, got {} parameters and {} gradients",
                        shape.len(),
                        p.len(),
                        g.len()
                    ),
                });
            }
            if let Some(entry) = g.iter().position(|v| !v.is_finite()) {
                return Err(OptimError::NonFiniteGradient { index, entry });
            }
        }

        self.t += 1;
        let (c0, c1) = if cfg.bias_correction {
            let t = self.t.min(i32::MAX as u64) as i32;
            (1.0 - cfg.beta1.powi(t), 1.0 - cfg.beta2.powi(t))
        } else {
            (1.0, 1.0)
        };
        for (((p, g), m0), m1) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m0)
            .zip(&mut self.m1)
        {
            for i in 0..g.len() {
                let gi = g[i];
                m0[i] = cfg.beta1 * m0[i] + (1.0 - cfg.beta1) * gi;
                m1[i] = cfg.beta2 * m1[i] + (1.0 - cfg.beta2) * gi * gi;
                let first = m0[i] / c0;
                let second = m1[i] / c1;
                p[i] -= cfg.learning_rate * first / (second + cfg.epsilon).sqrt();
            }
        }
        Ok(())
    }
}

pub fn adam_init(shapes: &[ParamShape]) -> Result<AdamState, OptimError> {
    AdamState::new(shapes)
}

pub fn adam_step(
    cfg: &AdamConfig,
    state: &mut AdamState,
    params: &mut [&mut [f64]],
    grads: &[&[f64]],
) -> Result<(), OptimError> {
    state.step(cfg, params, grads)
}
