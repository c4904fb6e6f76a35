//! Batch normalization over the channel (last) axis.
//!
//! Training mode normalizes with the biased statistics of the current
//! batch, computed over every axis except the last, and the whole
//! computation is expressed in traced primitive ops so gradients flow
//! through the batch statistics themselves. Moving statistics are
//! updated as a side effect of the training forward pass:
//!
//! ```text
//! moving = momentum * moving + (1 - momentum) * batch_stat
//! ```
//!
//! Inference mode applies the affine transform with the stored moving
//! statistics and builds no graph.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

use super::Mode;

pub struct BatchNormLayer<T: Scalar> {
    pub gamma: Tensor<T>,
    pub beta: Tensor<T>,
    pub moving_mean: Tensor<T>,
    pub moving_var: Tensor<T>,
    pub momentum: T,
    pub epsilon: T,
}

impl<T: Scalar> BatchNormLayer<T> {
    pub fn new(channels: usize) -> Result<BatchNormLayer<T>> {
        Ok(BatchNormLayer {
            gamma: Tensor::ones(&[channels])?.traced(),
            beta: Tensor::zeros(&[channels])?.traced(),
            moving_mean: Tensor::zeros(&[channels])?,
            moving_var: Tensor::ones(&[channels])?,
            momentum: T::from_f64(0.99),
            epsilon: T::from_f64(1e-3),
        })
    }

    pub fn channels(&self) -> usize {
        self.gamma.numel()
    }

    pub fn param_count(&self) -> usize {
        self.gamma.numel() + self.beta.numel()
    }

    pub fn forward(&self, x: &Tensor<T>, mode: Mode) -> Result<Tensor<T>> {
        let c = self.channels();
        if x.rank() < 2 || x.shape()[x.rank() - 1] != c {
            return Err(Error::ShapeMismatch(format!(
                "batch norm over {c} channels cannot take shape {:?}",
                x.shape()
            )));
        }
        match mode {
            Mode::Train => self.forward_train(x),
            Mode::Infer => self.forward_infer(x),
        }
    }

    fn forward_train(&self, x: &Tensor<T>) -> Result<Tensor<T>> {
        let axes: Vec<usize> = (0..x.rank() - 1).collect();
        let mean = x.mean_axes(&axes)?;
        let centered = x.sub(&mean)?;
        let var = centered.mul(&centered)?.mean_axes(&axes)?;

        self.update_moving(&mean, &var);

        let inv_std = var.add_scalar(self.epsilon).sqrt().recip();
        centered.mul(&inv_std)?.mul(&self.gamma)?.add(&self.beta)
    }

    fn forward_infer(&self, x: &Tensor<T>) -> Result<Tensor<T>> {
        let inv_std = self
            .moving_var
            .add_scalar(self.epsilon)
            .sqrt()
            .recip();
        x.sub(&self.moving_mean)?
            .mul(&inv_std)?
            .mul(&self.gamma.detached())?
            .add(&self.beta.detached())
    }

    fn update_moving(&self, batch_mean: &Tensor<T>, batch_var: &Tensor<T>) {
        let m = self.momentum;
        let one_minus = T::ONE - m;
        let bm = batch_mean.data();
        let bv = batch_var.data();
        let mut mm = self.moving_mean.data_mut();
        let mut mv = self.moving_var.data_mut();
        for i in 0..mm.len() {
            mm[i] = m * mm[i] + one_minus * bm[i];
            mv[i] = m * mv[i] + one_minus * bv[i];
        }
    }
}
