//! Small dense matrix kernels.
//!
//! All convolutions in this crate lower to one of these three products
//! over patch matrices. The loops are ordered so the innermost statement
//! is a contiguous multiply-add the compiler can autovectorize; matrices
//! here are small enough (inner extents in the hundreds, output widths
//! of 16 to 256 channels) that explicit cache tiling buys nothing.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;

/// `C = A·B` with `A: [n, k]`, `B: [k, m]`; returns `C: [n, m]`.
pub fn matmul_nn<T: Scalar>(a: &[T], b: &[T], n: usize, k: usize, m: usize) -> Vec<T> {
    let mut out = vec![T::ZERO; n * m];
    matmul_nn_acc(a, b, &mut out, n, k, m);
    out
}

/// `C += A·B` with `A: [n, k]`, `B: [k, m]`, `C: [n, m]`.
pub fn matmul_nn_acc<T: Scalar>(a: &[T], b: &[T], out: &mut [T], n: usize, k: usize, m: usize) {
    debug_assert_eq!(a.len(), n * k);
    debug_assert_eq!(b.len(), k * m);
    debug_assert_eq!(out.len(), n * m);
    for i in 0..n {
        let arow = &a[i * k..(i + 1) * k];
        let orow = &mut out[i * m..(i + 1) * m];
        for (kk, &av) in arow.iter().enumerate() {
            let brow = &b[kk * m..(kk + 1) * m];
            for (o, &bv) in orow.iter_mut().zip(brow.iter()) {
                *o += av * bv;
            }
        }
    }
}

/// Transpose of a row-major `[r, c]` matrix, as `[c, r]`.
///
/// Multiplying against a pre-transposed operand keeps the multiply-add
/// loops contiguous; the dot-product form in [`matmul_nt`] cannot be
/// vectorized because float reduction order is fixed.
pub fn transpose<T: Scalar>(b: &[T], r: usize, c: usize) -> Vec<T> {
    debug_assert_eq!(b.len(), r * c);
    let mut out = vec![T::ZERO; r * c];
    for i in 0..r {
        for (j, &v) in b[i * c..(i + 1) * c].iter().enumerate() {
            out[j * r + i] = v;
        }
    }
    out
}

/// `C = A·Bᵀ` with `A: [n, k]`, `B: [m, k]`; returns `C: [n, m]`.
pub fn matmul_nt<T: Scalar>(a: &[T], b: &[T], n: usize, k: usize, m: usize) -> Vec<T> {
    debug_assert_eq!(a.len(), n * k);
    debug_assert_eq!(b.len(), m * k);
    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        let arow = &a[i * k..(i + 1) * k];
        for j in 0..m {
            let brow = &b[j * k..(j + 1) * k];
            let mut acc = T::ZERO;
            for (&x, &y) in arow.iter().zip(brow.iter()) {
                acc += x * y;
            }
            out.push(acc);
        }
    }
    out
}

/// `C = Aᵀ·B` with `A: [k, n]`, `B: [k, m]`; returns `C: [n, m]`.
pub fn matmul_tn<T: Scalar>(a: &[T], b: &[T], k: usize, n: usize, m: usize) -> Vec<T> {
    let mut out = vec![T::ZERO; n * m];
    matmul_tn_acc(a, b, &mut out, k, n, m);
    out
}

/// `C += Aᵀ·B` with `A: [k, n]`, `B: [k, m]`, `C: [n, m]`.
///
/// The accumulating form lets weight gradients sum over batch slabs
/// without an intermediate buffer.
pub fn matmul_tn_acc<T: Scalar>(a: &[T], b: &[T], out: &mut [T], k: usize, n: usize, m: usize) {
    debug_assert_eq!(a.len(), k * n);
    debug_assert_eq!(b.len(), k * m);
    debug_assert_eq!(out.len(), n * m);
    for l in 0..k {
        let arow = &a[l * n..(l + 1) * n];
        let brow = &b[l * m..(l + 1) * m];
        for (i, &av) in arow.iter().enumerate() {
            let orow = &mut out[i * m..(i + 1) * m];
            for (o, &bv) in orow.iter_mut().zip(brow.iter()) {
                *o += av * bv;
            }
        }
    }
}
