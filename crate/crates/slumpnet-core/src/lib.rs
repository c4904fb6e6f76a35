//! Spatio-temporal regression engine for estimating concrete workability
//! (slump, in centimeters) from short videos of a rotating mixer drum.
//!
//! The crate is self-contained: it ships a small reverse-mode autodiff
//! engine over dense row-major tensors, the convolutional building blocks
//! needed by the three video model families (time-distributed 2D
//! convolution, 3D convolution, and convolutional LSTM), an AdamW trainer,
//! a deterministic synthetic clip generator, and the preprocessing
//! pipeline that turns raw clips into training windows.
//!
//! Everything here is `no_std`-compatible (with `alloc`); file formats,
//! CSV handling, and the command-line surface live in the companion
//! `slumpnet-cli` crate.
//!
//! Layout convention: dense row-major buffers with shape order
//! `(N, T, H, W, C)` and the channel dimension innermost. Binary
//! elementwise operations broadcast trailing dimensions.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod autograd;
pub mod baseline;
pub mod check;
pub mod error;
pub mod gemm;
pub mod layers;
pub mod models;
pub mod ops;
pub mod optim;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod synth;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use scalar::{DType, Scalar};
pub use tensor::Tensor;
