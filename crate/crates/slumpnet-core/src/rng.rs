//! Deterministic random number streams.
//!
//! Every stochastic decision in the engine (parameter init, clip content,
//! epoch shuffling, split assignment, slump sampling) draws from its own
//! independent stream of a counter-based generator, keyed by
//! `(master_seed, stream_index)`. Streams can be opened in any order
//! without generating intermediate values, which is what makes runs
//! reproducible even when components consume different amounts of
//! randomness.
//!
//! The generator is ChaCha8: cross-platform, word-aligned, and
//! bit-identical everywhere. Results never depend on platform entropy.

use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::scalar::Scalar;

/// Documented map from purpose to stream index.
///
/// Indices below `1 << 32` are reserved for singleton purposes; the upper
/// ranges are parameterized families (one stream per epoch or per clip).
pub mod streams {
    /// Model parameter initialization.
    pub const PARAM_INIT: u64 = 1;
    /// Assignment of clips to train / validation / test splits.
    pub const SPLIT: u64 = 2;
    /// Slump values drawn when synthesizing a dataset.
    pub const SLUMP: u64 = 3;

    const SHUFFLE_BASE: u64 = 1 << 32;
    const CLIP_BASE: u64 = 2 << 32;

    /// Training-set shuffle for one epoch (0-based).
    pub fn shuffle(epoch: usize) -> u64 {
        SHUFFLE_BASE + epoch as u64
    }

    /// Content of one synthesized clip (0-based index in the dataset).
    pub fn clip(index: usize) -> u64 {
        CLIP_BASE + index as u64
    }
}

/// One independent random stream.
#[derive(Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

impl RngStream {
    /// Opens stream `stream` of the generator keyed by `seed`.
    pub fn new(seed: u64, stream: u64) -> RngStream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { rng, seed, stream }
    }

    /// Opens a sibling stream under the same master seed.
    pub fn sibling(&self, stream: u64) -> RngStream {
        RngStream::new(self.seed, stream)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw from `[0, 1)` with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)`, unbiased via rejection sampling.
    pub fn next_below(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_below requires n > 0");
        let n = n as u64;
        let zone = (u64::MAX / n) * n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    /// Fills a buffer with uniform draws from `[lo, hi)`.
    pub fn fill_uniform<T: Scalar>(&mut self, buf: &mut [T], lo: f64, hi: f64) {
        for v in buf.iter_mut() {
            *v = T::from_f64(self.uniform(lo, hi));
        }
    }

    /// Collects `n` uniform draws from `[lo, hi)`.
    pub fn uniform_vec<T: Scalar>(&mut self, n: usize, lo: f64, hi: f64) -> Vec<T> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(T::from_f64(self.uniform(lo, hi)));
        }
        out
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<E>(&mut self, xs: &mut [E]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below(i + 1);
            xs.swap(i, j);
        }
    }
}
