//! Convolutional LSTM over image sequences.
//!
//! Gate pre-activations at step `t` are
//!
//! ```text
//! z_t = conv(x_t, W_x) + conv(h_{t-1}, W_h) + b
//! ```
//!
//! with both convolutions same-padded, stride 1, and the four gates
//! packed along the channel axis in the order `i, f, g, o`. The state
//! update is the standard peephole-free form:
//!
//! ```text
//! i, f, o = sigmoid(z_i), sigmoid(z_f), sigmoid(z_o)
//! g       = tanh(z_g)
//! c_t     = f * c_{t-1} + i * g
//! h_t     = o * tanh(c_t)
//! ```
//!
//! Initial `h` and `c` are zero. The layer returns the full hidden
//! sequence `[N, T, H, W, C]`. Because every step shares the same
//! kernels, backpropagation through time falls out of the tape: each
//! step's conv accumulates into the same kernel leaves.

use alloc::vec::Vec;

use crate::error::Result;
use crate::ops::stack_time;
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

use super::conv::conv2d;
use super::{time_distributed, Mode};

pub struct ConvLstm2dLayer<T: Scalar> {
    /// Input-to-state kernel `[k, k, C_in, 4C]`.
    pub input_kernel: Tensor<T>,
    /// State-to-state kernel `[k, k, C, 4C]`.
    pub recurrent_kernel: Tensor<T>,
    /// Gate bias `[4C]`, applied once in the input-to-state term.
    pub bias: Tensor<T>,
    pub channels: usize,
}

impl<T: Scalar> ConvLstm2dLayer<T> {
    pub fn new(
        k: usize,
        c_in: usize,
        channels: usize,
        rng: &mut RngStream,
    ) -> Result<ConvLstm2dLayer<T>> {
        Ok(ConvLstm2dLayer {
            input_kernel: Tensor::he_uniform(&[k, k, c_in, 4 * channels], k * k * c_in, rng)?
                .traced(),
            recurrent_kernel: Tensor::he_uniform(
                &[k, k, channels, 4 * channels],
                k * k * channels,
                rng,
            )?
            .traced(),
            bias: Tensor::zeros(&[4 * channels])?.traced(),
            channels,
        })
    }

    pub fn param_count(&self) -> usize {
        self.input_kernel.numel() + self.recurrent_kernel.numel() + self.bias.numel()
    }

    /// Runs the full sequence and returns every hidden state.
    ///
    /// The input-to-state convolution does not depend on the recurrence,
    /// so it is hoisted out of the time loop and computed for all frames
    /// in one batched call.
    pub fn forward(&self, x: &Tensor<T>, mode: Mode) -> Result<Tensor<T>> {
        let (wi, wh, b) = self.kernels(mode);
        let steps = x.shape()[1];
        let z = time_distributed(x, |frames| conv2d(frames, &wi, Some(&b), 1))?;

        let (n, h, w) = (z.shape()[0], z.shape()[2], z.shape()[3]);
        let mut hidden = Tensor::zeros(&[n, h, w, self.channels])?;
        let mut cell = Tensor::zeros(&[n, h, w, self.channels])?;
        let mut outputs: Vec<Tensor<T>> = Vec::with_capacity(steps);
        for t in 0..steps {
            let z_t = z.narrow(1, t, 1)?.reshape(&[n, h, w, 4 * self.channels])?;
            // h_0 is identically zero, so the first recurrent term is too.
            let gates = if t == 0 {
                z_t
            } else {
                z_t.add(&conv2d(&hidden, &wh, None, 1)?)?
            };
            let (h_t, c_t) = cell_update(&gates, &cell, self.channels)?;
            hidden = h_t;
            cell = c_t;
            outputs.push(hidden.clone());
        }
        stack_time(&outputs)
    }

    /// One recurrence step from explicit states. `x_t` is `[N, H, W, C_in]`.
    pub fn step(
        &self,
        x_t: &Tensor<T>,
        h_prev: &Tensor<T>,
        c_prev: &Tensor<T>,
        mode: Mode,
    ) -> Result<(Tensor<T>, Tensor<T>)> {
        let (wi, wh, b) = self.kernels(mode);
        let gates = conv2d(x_t, &wi, Some(&b), 1)?.add(&conv2d(h_prev, &wh, None, 1)?)?;
        cell_update(&gates, c_prev, self.channels)
    }

    fn kernels(&self, mode: Mode) -> (Tensor<T>, Tensor<T>, Tensor<T>) {
        match mode {
            Mode::Train => (
                self.input_kernel.clone(),
                self.recurrent_kernel.clone(),
                self.bias.clone(),
            ),
            Mode::Infer => (
                self.input_kernel.detached(),
                self.recurrent_kernel.detached(),
                self.bias.detached(),
            ),
        }
    }
}

/// Applies the gate nonlinearities and state update to packed
/// pre-activations `[N, H, W, 4C]`.
fn cell_update<T: Scalar>(
    gates: &Tensor<T>,
    c_prev: &Tensor<T>,
    ch: usize,
) -> Result<(Tensor<T>, Tensor<T>)> {
    let axis = gates.rank() - 1;
    let i = gates.narrow(axis, 0, ch)?.sigmoid();
    let f = gates.narrow(axis, ch, ch)?.sigmoid();
    let g = gates.narrow(axis, 2 * ch, ch)?.tanh();
    let o = gates.narrow(axis, 3 * ch, ch)?.sigmoid();
    let c = f.mul(c_prev)?.add(&i.mul(&g)?)?;
    let h = o.mul(&c.tanh())?;
    Ok((h, c))
}
