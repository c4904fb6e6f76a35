//! AdamW optimizer with decoupled weight decay.
//!
//! Per parameter `p` with gradient `g` at step `t`:
//!
//! ```text
//! m = b1*m + (1-b1)*g          mhat = m / (1 - b1^t)
//! v = b2*v + (1-b2)*g*g        vhat = v / (1 - b2^t)
//! p = p * (1 - lr*wd)                      (decayed parameters only)
//! p = p - lr * mhat / (sqrt(vhat) + eps)
//! ```
//!
//! The decay multiplier is applied on its own before the adaptive step,
//! so with a zero gradient the update is exactly `p * (1 - lr*wd)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// A named trainable tensor. `decay` marks parameters subject to weight
/// decay (convolution kernels and dense weights; biases and
/// normalization scales are exempt).
pub struct Param<T: Scalar> {
    pub name: String,
    pub tensor: Tensor<T>,
    pub decay: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct AdamWConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> AdamWConfig {
        AdamWConfig {
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            weight_decay: 1e-4,
        }
    }
}

struct Slot<T> {
    m: Vec<T>,
    v: Vec<T>,
}

/// Optimizer state. Moment slots are matched to parameters by position,
/// so `step` must always be called with the same parameter list the
/// optimizer was built from.
pub struct AdamW<T: Scalar> {
    cfg: AdamWConfig,
    t: u64,
    slots: Vec<Slot<T>>,
}

impl<T: Scalar> AdamW<T> {
    pub fn new(cfg: AdamWConfig, params: &[Param<T>]) -> AdamW<T> {
        let slots = params
            .iter()
            .map(|p| Slot {
                m: vec![T::ZERO; p.tensor.numel()],
                v: vec![T::ZERO; p.tensor.numel()],
            })
            .collect();
        AdamW { cfg, t: 0, slots }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// Consumes each parameter's accumulated gradient and applies one
    /// update. Fails if any gradient is missing or non-finite, naming
    /// the offending parameter.
    pub fn step(&mut self, params: &[Param<T>]) -> Result<()> {
        if params.len() != self.slots.len() {
            return Err(Error::InvalidValue(format!(
                "optimizer was built for {} parameters, step got {}",
                self.slots.len(),
                params.len()
            )));
        }
        self.t += 1;
        let lr = T::from_f64(self.cfg.lr);
        let b1 = T::from_f64(self.cfg.beta1);
        let b2 = T::from_f64(self.cfg.beta2);
        let one_m_b1 = T::ONE - b1;
        let one_m_b2 = T::ONE - b2;
        let eps = T::from_f64(self.cfg.epsilon);
        let bc1 = T::ONE - b1.powi(self.t as i32);
        let bc2 = T::ONE - b2.powi(self.t as i32);
        let keep = T::ONE - lr * T::from_f64(self.cfg.weight_decay);

        for (param, slot) in params.iter().zip(self.slots.iter_mut()) {
            let grad = param.tensor.take_grad().ok_or_else(|| {
                Error::NoGraph(format!(
                    "parameter '{}' has no gradient; run backward() before step()",
                    param.name
                ))
            })?;
            if grad.len() != slot.m.len() {
                return Err(Error::ShapeMismatch(format!(
                    "gradient for '{}' has {} elements, expected {}",
                    param.name,
                    grad.len(),
                    slot.m.len()
                )));
            }
            if grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NumericFailure(format!(
                    "non-finite gradient for parameter '{}'",
                    param.name
                )));
            }
            let mut data = param.tensor.data_mut();
            for idx in 0..grad.len() {
                let g = grad[idx];
                let m = b1 * slot.m[idx] + one_m_b1 * g;
                let v = b2 * slot.v[idx] + one_m_b2 * g * g;
                slot.m[idx] = m;
                slot.v[idx] = v;
                let mhat = m / bc1;
                let vhat = v / bc2;
                if param.decay {
                    data[idx] = data[idx] * keep;
                }
                data[idx] = data[idx] - lr * mhat / (vhat.sqrt() + eps);
            }
        }
        Ok(())
    }
}
