//! 2D and 3D convolution, lowered to patch-matrix products.
//!
//! Both operations use "same" padding and cross-correlation orientation
//! (no kernel flip). For an axis of length `L`, kernel `k`, stride `s`:
//!
//! ```text
//! out     = ceil(L / s)
//! pad_lo  = max(0, (out - 1) * s + k - L) / 2      (extra pad on the high side)
//! ```
//!
//! The forward pass gathers each sample (each output frame for 3D) into
//! a patch matrix of shape `[out_positions, k_elems]` and multiplies by
//! the kernel viewed as `[k_elems, c_out]`. Patch matrices are rebuilt
//! in the backward pass instead of cached: recomputing costs a fraction
//! of the surrounding products and keeps training memory proportional
//! to activations, not to `k^2` times activations.

use alloc::boxed::Box;
use alloc::format;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;

use crate::autograd::Node;
use crate::error::{Error, Result};
use crate::gemm;
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

use super::Mode;

/// Output length and low-side padding for one same-padded axis.
pub(crate) fn same_geometry(len: usize, k: usize, stride: usize) -> (usize, usize) {
    let out = (len + stride - 1) / stride;
    let total = ((out - 1) * stride + k).saturating_sub(len);
    (out, total / 2)
}

/// Copies one spatial patch grid from a `[H, W, C]` frame into rows of a
/// patch matrix. Rows are `row_stride` wide; this call fills the
/// `kh*kw*c` block starting at `col_offset` in each row (3D convolution
/// fills one such block per temporal tap). Out-of-bounds taps are left
/// untouched, so the buffer must be zeroed beforehand.
#[allow(clippy::too_many_arguments)]
fn im2col_patch<T: Scalar>(
    x: &[T],
    h: usize,
    w: usize,
    c: usize,
    kh: usize,
    kw: usize,
    stride: usize,
    out_h: usize,
    out_w: usize,
    pad_top: usize,
    pad_left: usize,
    col: &mut [T],
    row_stride: usize,
    col_offset: usize,
) {
    for oh in 0..out_h {
        for ow in 0..out_w {
            let row = (oh * out_w + ow) * row_stride + col_offset;
            for ki in 0..kh {
                let ih = (oh * stride + ki) as isize - pad_top as isize;
                if ih < 0 || ih >= h as isize {
                    continue;
                }
                let iw0 = (ow * stride) as isize - pad_left as isize;
                let lo = (-iw0).max(0) as usize;
                let hi = ((w as isize - iw0).max(0) as usize).min(kw);
                if lo >= hi {
                    continue;
                }
                let src = ((ih as usize * w) as isize + iw0 + lo as isize) as usize * c;
                let dst = row + (ki * kw + lo) * c;
                let len = (hi - lo) * c;
                col[dst..dst + len].copy_from_slice(&x[src..src + len]);
            }
        }
    }
}

/// Transpose of [`im2col_patch`]: scatter-adds patch-matrix gradients
/// back onto the input frame.
#[allow(clippy::too_many_arguments)]
fn col2im_patch<T: Scalar>(
    dx: &mut [T],
    h: usize,
    w: usize,
    c: usize,
    kh: usize,
    kw: usize,
    stride: usize,
    out_h: usize,
    out_w: usize,
    pad_top: usize,
    pad_left: usize,
    dcol: &[T],
    row_stride: usize,
    col_offset: usize,
) {
    for oh in 0..out_h {
        for ow in 0..out_w {
            let row = (oh * out_w + ow) * row_stride + col_offset;
            for ki in 0..kh {
                let ih = (oh * stride + ki) as isize - pad_top as isize;
                if ih < 0 || ih >= h as isize {
                    continue;
                }
                let iw0 = (ow * stride) as isize - pad_left as isize;
                let lo = (-iw0).max(0) as usize;
                let hi = ((w as isize - iw0).max(0) as usize).min(kw);
                if lo >= hi {
                    continue;
                }
                let dst = ((ih as usize * w) as isize + iw0 + lo as isize) as usize * c;
                let src = row + (ki * kw + lo) * c;
                for i in 0..(hi - lo) * c {
                    dx[dst + i] += dcol[src + i];
                }
            }
        }
    }
}

/// Writes `bias` (or zero) across every row of an output block.
fn fill_bias<T: Scalar>(block: &mut [T], bias: Option<&[T]>, cout: usize) {
    match bias {
        Some(b) => {
            for row in block.chunks_mut(cout) {
                row.copy_from_slice(b);
            }
        }
        None => block.fill(T::ZERO),
    }
}

/// 2D convolution over `[N, H, W, C_in]` with kernel
/// `[kh, kw, C_in, C_out]`, same padding, square stride.
pub fn conv2d<T: Scalar>(
    x: &Tensor<T>,
    kernel: &Tensor<T>,
    bias: Option<&Tensor<T>>,
    stride: usize,
) -> Result<Tensor<T>> {
    if x.rank() != 4 {
        return Err(Error::InvalidShape(format!(
            "conv2d input must be [N, H, W, C], got {:?}",
            x.shape()
        )));
    }
    if kernel.rank() != 4 {
        return Err(Error::InvalidShape(format!(
            "conv2d kernel must be [kh, kw, C_in, C_out], got {:?}",
            kernel.shape()
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidValue("conv2d stride must be >= 1".into()));
    }
    let (n, h, w, cin) = (x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]);
    let (kh, kw, kcin, cout) = (
        kernel.shape()[0],
        kernel.shape()[1],
        kernel.shape()[2],
        kernel.shape()[3],
    );
    if kcin != cin {
        return Err(Error::ShapeMismatch(format!(
            "conv2d channel mismatch: input has {cin}, kernel expects {kcin}"
        )));
    }
    if let Some(b) = bias {
        if b.shape() != [cout] {
            return Err(Error::ShapeMismatch(format!(
                "conv2d bias must be [{cout}], got {:?}",
                b.shape()
            )));
        }
    }

    let (out_h, pad_top) = same_geometry(h, kh, stride);
    let (out_w, pad_left) = same_geometry(w, kw, stride);
    let rows = out_h * out_w;
    let kdim = kh * kw * cin;
    let frame_in = h * w * cin;
    let block = rows * cout;

    let mut out = vec![T::ZERO; n * block];
    {
        let xd = x.data();
        let wd = kernel.data();
        let bd = bias.map(|b| b.to_vec());
        let mut col = vec![T::ZERO; rows * kdim];
        for i in 0..n {
            col.fill(T::ZERO);
            im2col_patch(
                &xd[i * frame_in..(i + 1) * frame_in],
                h,
                w,
                cin,
                kh,
                kw,
                stride,
                out_h,
                out_w,
                pad_top,
                pad_left,
                &mut col,
                kdim,
                0,
            );
            let ob = &mut out[i * block..(i + 1) * block];
            fill_bias(ob, bd.as_deref(), cout);
            gemm::matmul_nn_acc(&col, &wd, ob, rows, kdim, cout);
        }
    }

    let x_node = x.node_rc();
    let k_node = kernel.node_rc();
    let b_node = bias.and_then(|b| b.node_rc());
    let out_shape = vec![n, out_h, out_w, cout];
    if x_node.is_none() && k_node.is_none() && b_node.is_none() {
        return Tensor::from_vec(&out_shape, out);
    }

    let mut parents = Vec::new();
    for node in [&x_node, &k_node, &b_node].into_iter().flatten() {
        parents.push(Rc::clone(node));
    }
    let x_data = x.data_rc();
    let w_data = kernel.data_rc();
    let numel = out.len();
    let node = Node::op(
        "conv2d",
        numel,
        parents,
        Box::new(move |g: &[T]| {
            let xd = x_data.borrow();
            let wd = w_data.borrow();
            let mut dw = if k_node.is_some() {
                vec![T::ZERO; kdim * cout]
            } else {
                Vec::new()
            };
            let (mut dx, wt, mut dcol) = if x_node.is_some() {
                (
                    vec![T::ZERO; n * frame_in],
                    gemm::transpose(&wd, kdim, cout),
                    vec![T::ZERO; rows * kdim],
                )
            } else {
                (Vec::new(), Vec::new(), Vec::new())
            };
            let mut col = vec![T::ZERO; rows * kdim];
            for i in 0..n {
                let gb = &g[i * block..(i + 1) * block];
                if k_node.is_some() {
                    col.fill(T::ZERO);
                    im2col_patch(
                        &xd[i * frame_in..(i + 1) * frame_in],
                        h,
                        w,
                        cin,
                        kh,
                        kw,
                        stride,
                        out_h,
                        out_w,
                        pad_top,
                        pad_left,
                        &mut col,
                        kdim,
                        0,
                    );
                    gemm::matmul_tn_acc(&col, gb, &mut dw, rows, kdim, cout);
                }
                if x_node.is_some() {
                    dcol.fill(T::ZERO);
                    gemm::matmul_nn_acc(gb, &wt, &mut dcol, rows, cout, kdim);
                    col2im_patch(
                        &mut dx[i * frame_in..(i + 1) * frame_in],
                        h,
                        w,
                        cin,
                        kh,
                        kw,
                        stride,
                        out_h,
                        out_w,
                        pad_top,
                        pad_left,
                        &dcol,
                        kdim,
                        0,
                    );
                }
            }
            if let Some(nd) = &k_node {
                nd.accumulate_owned(dw);
            }
            if let Some(nd) = &x_node {
                nd.accumulate_owned(dx);
            }
            if let Some(nd) = &b_node {
                let mut db = vec![T::ZERO; cout];
                for row in g.chunks(cout) {
                    for (d, &v) in db.iter_mut().zip(row.iter()) {
                        *d += v;
                    }
                }
                nd.accumulate_owned(db);
            }
        }),
    );
    Ok(Tensor::from_parts(out_shape, out, Some(node)))
}

/// 3D convolution over `[N, T, H, W, C_in]` with kernel
/// `[kt, kh, kw, C_in, C_out]`, same padding on all three axes.
pub fn conv3d<T: Scalar>(
    x: &Tensor<T>,
    kernel: &Tensor<T>,
    bias: Option<&Tensor<T>>,
    stride_t: usize,
    stride_s: usize,
) -> Result<Tensor<T>> {
    if x.rank() != 5 {
        return Err(Error::InvalidShape(format!(
            "conv3d input must be [N, T, H, W, C], got {:?}",
            x.shape()
        )));
    }
    if kernel.rank() != 5 {
        return Err(Error::InvalidShape(format!(
            "conv3d kernel must be [kt, kh, kw, C_in, C_out], got {:?}",
            kernel.shape()
        )));
    }
    if stride_t == 0 || stride_s == 0 {
        return Err(Error::InvalidValue("conv3d strides must be >= 1".into()));
    }
    let (n, t, h, w, cin) = (
        x.shape()[0],
        x.shape()[1],
        x.shape()[2],
        x.shape()[3],
        x.shape()[4],
    );
    let (kt, kh, kw, kcin, cout) = (
        kernel.shape()[0],
        kernel.shape()[1],
        kernel.shape()[2],
        kernel.shape()[3],
        kernel.shape()[4],
    );
    if kcin != cin {
        return Err(Error::ShapeMismatch(format!(
            "conv3d channel mismatch: input has {cin}, kernel expects {kcin}"
        )));
    }
    if let Some(b) = bias {
        if b.shape() != [cout] {
            return Err(Error::ShapeMismatch(format!(
                "conv3d bias must be [{cout}], got {:?}",
                b.shape()
            )));
        }
    }

    let (out_t, pad_t) = same_geometry(t, kt, stride_t);
    let (out_h, pad_top) = same_geometry(h, kh, stride_s);
    let (out_w, pad_left) = same_geometry(w, kw, stride_s);
    let rows = out_h * out_w;
    let tap = kh * kw * cin;
    let kdim = kt * tap;
    let frame_in = h * w * cin;
    let sample_in = t * frame_in;
    let block = rows * cout;
    let sample_out = out_t * block;

    let mut out = vec![T::ZERO; n * sample_out];
    {
        let xd = x.data();
        let wd = kernel.data();
        let bd = bias.map(|b| b.to_vec());
        let mut col = vec![T::ZERO; rows * kdim];
        for i in 0..n {
            let xs = &xd[i * sample_in..(i + 1) * sample_in];
            for ot in 0..out_t {
                col.fill(T::ZERO);
                for ki in 0..kt {
                    let it = (ot * stride_t + ki) as isize - pad_t as isize;
                    if it < 0 || it >= t as isize {
                        continue;
                    }
                    let frame = &xs[it as usize * frame_in..(it as usize + 1) * frame_in];
                    im2col_patch(
                        frame, h, w, cin, kh, kw, stride_s, out_h, out_w, pad_top, pad_left,
                        &mut col, kdim, ki * tap,
                    );
                }
                let ob = &mut out[i * sample_out + ot * block..i * sample_out + (ot + 1) * block];
                fill_bias(ob, bd.as_deref(), cout);
                gemm::matmul_nn_acc(&col, &wd, ob, rows, kdim, cout);
            }
        }
    }

    let x_node = x.node_rc();
    let k_node = kernel.node_rc();
    let b_node = bias.and_then(|b| b.node_rc());
    let out_shape = vec![n, out_t, out_h, out_w, cout];
    if x_node.is_none() && k_node.is_none() && b_node.is_none() {
        return Tensor::from_vec(&out_shape, out);
    }

    let mut parents = Vec::new();
    for node in [&x_node, &k_node, &b_node].into_iter().flatten() {
        parents.push(Rc::clone(node));
    }
    let x_data = x.data_rc();
    let w_data = kernel.data_rc();
    let numel = out.len();
    let node = Node::op(
        "conv3d",
        numel,
        parents,
        Box::new(move |g: &[T]| {
            let xd = x_data.borrow();
            let wd = w_data.borrow();
            let mut dw = if k_node.is_some() {
                vec![T::ZERO; kdim * cout]
            } else {
                Vec::new()
            };
            let (mut dx, wt, mut dcol) = if x_node.is_some() {
                (
                    vec![T::ZERO; n * sample_in],
                    gemm::transpose(&wd, kdim, cout),
                    vec![T::ZERO; rows * kdim],
                )
            } else {
                (Vec::new(), Vec::new(), Vec::new())
            };
            let mut col = vec![T::ZERO; rows * kdim];
            for i in 0..n {
                let xs = &xd[i * sample_in..(i + 1) * sample_in];
                for ot in 0..out_t {
                    let gb = &g[i * sample_out + ot * block..i * sample_out + (ot + 1) * block];
                    if k_node.is_some() {
                        col.fill(T::ZERO);
                        for ki in 0..kt {
                            let it = (ot * stride_t + ki) as isize - pad_t as isize;
                            if it < 0 || it >= t as isize {
                                continue;
                            }
                            let frame =
                                &xs[it as usize * frame_in..(it as usize + 1) * frame_in];
                            im2col_patch(
                                frame, h, w, cin, kh, kw, stride_s, out_h, out_w, pad_top,
                                pad_left, &mut col, kdim, ki * tap,
                            );
                        }
                        gemm::matmul_tn_acc(&col, gb, &mut dw, rows, kdim, cout);
                    }
                    if x_node.is_some() {
                        dcol.fill(T::ZERO);
                        gemm::matmul_nn_acc(gb, &wt, &mut dcol, rows, cout, kdim);
                        let dxs = &mut dx[i * sample_in..(i + 1) * sample_in];
                        for ki in 0..kt {
                            let it = (ot * stride_t + ki) as isize - pad_t as isize;
                            if it < 0 || it >= t as isize {
                                continue;
                            }
                            let dframe = &mut dxs
                                [it as usize * frame_in..(it as usize + 1) * frame_in];
                            col2im_patch(
                                dframe, h, w, cin, kh, kw, stride_s, out_h, out_w, pad_top,
                                pad_left, &dcol, kdim, ki * tap,
                            );
                        }
                    }
                }
            }
            if let Some(nd) = &k_node {
                nd.accumulate_owned(dw);
            }
            if let Some(nd) = &x_node {
                nd.accumulate_owned(dx);
            }
            if let Some(nd) = &b_node {
                let mut db = vec![T::ZERO; cout];
                for row in g.chunks(cout) {
                    for (d, &v) in db.iter_mut().zip(row.iter()) {
                        *d += v;
                    }
                }
                nd.accumulate_owned(db);
            }
        }),
    );
    Ok(Tensor::from_parts(out_shape, out, Some(node)))
}

/// 2D convolutional layer with he-uniform kernel and zero bias.
pub struct Conv2dLayer<T: Scalar> {
    pub kernel: Tensor<T>,
    pub bias: Tensor<T>,
    pub stride: usize,
}

impl<T: Scalar> Conv2dLayer<T> {
    pub fn new(
        k: usize,
        c_in: usize,
        c_out: usize,
        stride: usize,
        rng: &mut RngStream,
    ) -> Result<Conv2dLayer<T>> {
        let fan_in = k * k * c_in;
        Ok(Conv2dLayer {
            kernel: Tensor::he_uniform(&[k, k, c_in, c_out], fan_in, rng)?.traced(),
            bias: Tensor::zeros(&[c_out])?.traced(),
            stride,
        })
    }

    pub fn forward(&self, x: &Tensor<T>, mode: Mode) -> Result<Tensor<T>> {
        match mode {
            Mode::Train => conv2d(x, &self.kernel, Some(&self.bias), self.stride),
            Mode::Infer => conv2d(
                x,
                &self.kernel.detached(),
                Some(&self.bias.detached()),
                self.stride,
            ),
        }
    }

    pub fn param_count(&self) -> usize {
        self.kernel.numel() + self.bias.numel()
    }
}

/// 3D convolutional layer with he-uniform kernel and zero bias.
pub struct Conv3dLayer<T: Scalar> {
    pub kernel: Tensor<T>,
    pub bias: Tensor<T>,
    pub stride_t: usize,
    pub stride_s: usize,
}

impl<T: Scalar> Conv3dLayer<T> {
    pub fn new(
        kt: usize,
        k: usize,
        c_in: usize,
        c_out: usize,
        rng: &mut RngStream,
    ) -> Result<Conv3dLayer<T>> {
        let fan_in = kt * k * k * c_in;
        Ok(Conv3dLayer {
            kernel: Tensor::he_uniform(&[kt, k, k, c_in, c_out], fan_in, rng)?.traced(),
            bias: Tensor::zeros(&[c_out])?.traced(),
            stride_t: 1,
            stride_s: 1,
        })
    }

    pub fn forward(&self, x: &Tensor<T>, mode: Mode) -> Result<Tensor<T>> {
        match mode {
            Mode::Train => conv3d(x, &self.kernel, Some(&self.bias), self.stride_t, self.stride_s),
            Mode::Infer => conv3d(
                x,
                &self.kernel.detached(),
                Some(&self.bias.detached()),
                self.stride_t,
                self.stride_s,
            ),
        }
    }

    pub fn param_count(&self) -> usize {
        self.kernel.numel() + self.bias.numel()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_geometry_matches_hand_cases() {
        // stride 1: output equals input, pad (k-1)/2 on the low side.
        assert_eq!(same_geometry(5, 3, 1), (5, 1));
        assert_eq!(same_geometry(5, 11, 1), (5, 5));
        // even kernel: extra padding goes to the high side.
        assert_eq!(same_geometry(4, 2, 1), (4, 0));
        // stride 2: ceil division.
        assert_eq!(same_geometry(5, 3, 2), (3, 1));
        assert_eq!(same_geometry(224, 3, 2), (112, 0));
    }

    #[test]
    fn zero_kernel_outputs_bias() {
        let x = Tensor::<f64>::from_vec(&[1, 3, 3, 2], (0..18).map(|i| i as f64).collect())
            .unwrap();
        let k = Tensor::<f64>::zeros(&[3, 3, 2, 4]).unwrap();
        let b = Tensor::<f64>::from_vec(&[4], alloc::vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = conv2d(&x, &k, Some(&b), 1).unwrap();
        assert_eq!(y.shape(), &[1, 3, 3, 4]);
        for pos in y.to_vec().chunks(4) {
            assert_eq!(pos, &[1.0, 2.0, 3.0, 4.0]);
        }
    }

    #[test]
    fn identity_1x1_kernel_passes_input_through() {
        let x = Tensor::<f64>::from_vec(&[1, 2, 2, 1], alloc::vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let k = Tensor::<f64>::ones(&[1, 1, 1, 1]).unwrap();
        let y = conv2d(&x, &k, None, 1).unwrap();
        assert_eq!(y.to_vec(), alloc::vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn averaging_kernel_on_constant_input_shows_border_padding() {
        // 3x3 ones kernel over a constant 1.0 input: interior sums 9,
        // edges see zero padding.
        let x = Tensor::<f64>::ones(&[1, 3, 3, 1]).unwrap();
        let k = Tensor::<f64>::ones(&[3, 3, 1, 1]).unwrap();
        let y = conv2d(&x, &k, None, 1).unwrap();
        let v = y.to_vec();
        assert_eq!(v[4], 9.0, "center tap covers the full window");
        assert_eq!(v[0], 4.0, "corner tap covers a 2x2 window");
        assert_eq!(v[1], 6.0, "edge tap covers a 2x3 window");
    }

    #[test]
    fn stride_two_downsamples() {
        let x = Tensor::<f64>::ones(&[1, 4, 4, 1]).unwrap();
        let k = Tensor::<f64>::ones(&[1, 1, 1, 1]).unwrap();
        let y = conv2d(&x, &k, None, 2).unwrap();
        assert_eq!(y.shape(), &[1, 2, 2, 1]);
    }

    #[test]
    fn conv3d_temporal_identity_kernel() {
        // kt=1 1x1 kernel: conv3d degenerates to a per-frame copy.
        let x =
            Tensor::<f64>::from_vec(&[1, 2, 2, 2, 1], (0..8).map(|i| i as f64).collect()).unwrap();
        let k = Tensor::<f64>::ones(&[1, 1, 1, 1, 1]).unwrap();
        let y = conv3d(&x, &k, None, 1, 1).unwrap();
        assert_eq!(y.to_vec(), x.to_vec());
    }

    #[test]
    fn conv3d_temporal_sum_kernel() {
        // kernel [3,1,1]: each output frame sums its temporal neighbors
        // (zero-padded at the ends).
        let x = Tensor::<f64>::from_vec(
            &[1, 3, 1, 1, 1],
            alloc::vec![1.0, 10.0, 100.0],
        )
        .unwrap();
        let k = Tensor::<f64>::ones(&[3, 1, 1, 1, 1]).unwrap();
        let y = conv3d(&x, &k, None, 1, 1).unwrap();
        assert_eq!(y.to_vec(), alloc::vec![11.0, 111.0, 110.0]);
    }

    #[test]
    fn shape_and_channel_validation() {
        let x = Tensor::<f64>::ones(&[1, 3, 3, 2]).unwrap();
        let bad_k = Tensor::<f64>::ones(&[3, 3, 5, 4]).unwrap();
        assert_eq!(conv2d(&x, &bad_k, None, 1).unwrap_err().kind(), "shape-mismatch");
        let k = Tensor::<f64>::ones(&[3, 3, 2, 4]).unwrap();
        assert_eq!(conv2d(&x, &k, None, 0).unwrap_err().kind(), "invalid-value");
        let bad_b = Tensor::<f64>::ones(&[3]).unwrap();
        assert_eq!(
            conv2d(&x, &k, Some(&bad_b), 1).unwrap_err().kind(),
            "shape-mismatch"
        );
    }

    #[test]
    fn layer_param_counts() {
        let mut rng = RngStream::new(1, 0);
        let c2 = Conv2dLayer::<f32>::new(3, 3, 16, 1, &mut rng).unwrap();
        assert_eq!(c2.param_count(), 3 * 3 * 3 * 16 + 16);
        let c3 = Conv3dLayer::<f32>::new(3, 3, 3, 16, &mut rng).unwrap();
        assert_eq!(c3.param_count(), 3 * 3 * 3 * 3 * 16 + 16);
    }

    #[test]
    fn infer_mode_builds_no_graph() {
        let mut rng = RngStream::new(1, 0);
        let layer = Conv2dLayer::<f32>::new(3, 1, 2, 1, &mut rng).unwrap();
        let x = Tensor::<f32>::ones(&[1, 4, 4, 1]).unwrap();
        assert!(!layer.forward(&x, Mode::Infer).unwrap().is_traced());
        assert!(layer.forward(&x, Mode::Train).unwrap().is_traced());
    }
}
