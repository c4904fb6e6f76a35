//! Neural network building blocks.
//!
//! Layers own their parameters as traced leaf tensors. `forward` takes a
//! [`Mode`]: in `Train` the computation is recorded on the gradient tape
//! and batch statistics are live; in `Infer` parameters are detached (no
//! tape) and normalization uses moving statistics.

mod conv;
mod convlstm;
mod dense;
mod norm;
mod pool;

pub use conv::{conv2d, conv3d, Conv2dLayer, Conv3dLayer};
pub use convlstm::ConvLstm2dLayer;
pub use dense::DenseLayer;
pub use norm::BatchNormLayer;
pub use pool::{maxpool2d, maxpool3d};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor;
use alloc::format;
use alloc::vec::Vec;

/// Forward-pass mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Record gradients; batch normalization uses batch statistics and
    /// updates its moving averages.
    Train,
    /// No gradient tape; batch normalization uses moving statistics.
    Infer,
}

/// Applies a per-frame operation across the time axis by folding
/// `[N, T, rest..]` into `[N*T, rest..]`, calling `f`, and unfolding.
///
/// The folds are reshapes over shared buffers, so this costs nothing
/// beyond the wrapped operation itself.
pub fn time_distributed<T, F>(x: &Tensor<T>, f: F) -> Result<Tensor<T>>
where
    T: Scalar,
    F: FnOnce(&Tensor<T>) -> Result<Tensor<T>>,
{
    let s = x.shape();
    if s.len() < 3 {
        return Err(Error::InvalidShape(format!(
            "time_distributed needs rank >= 3, shape is {s:?}"
        )));
    }
    let (n, t) = (s[0], s[1]);
    let mut folded = Vec::with_capacity(s.len() - 1);
    folded.push(n * t);
    folded.extend_from_slice(&s[2..]);
    let y = f(&x.reshape(&folded)?)?;
    let ys = y.shape();
    if ys[0] != n * t {
        return Err(Error::ShapeMismatch(format!(
            "time_distributed inner op changed the batch extent: {} -> {}",
            n * t,
            ys[0]
        )));
    }
    let mut unfolded = Vec::with_capacity(ys.len() + 1);
    unfolded.push(n);
    unfolded.push(t);
    unfolded.extend_from_slice(&ys[1..]);
    y.reshape(&unfolded)
}
