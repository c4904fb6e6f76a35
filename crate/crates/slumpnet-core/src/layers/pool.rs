//! Max pooling with window 2 and stride 2 (the only configuration the
//! model family uses).
//!
//! Output extents use floor division, so a trailing odd row or column
//! is dropped. Gradients flow to the argmax position only; on ties the
//! first element in scan order (row-major, temporal first) wins. The 3D
//! variant clamps its temporal window to 1 when the input has a single
//! frame left, so deep stacks remain usable on short clips.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::autograd::Node;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// 2x2 max pool over `[N, H, W, C]`, stride 2.
pub fn maxpool2d<T: Scalar>(x: &Tensor<T>) -> Result<Tensor<T>> {
    if x.rank() != 4 {
        return Err(Error::InvalidShape(format!(
            "maxpool2d input must be [N, H, W, C], got {:?}",
            x.shape()
        )));
    }
    let (n, h, w, c) = (x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]);
    if h < 2 || w < 2 {
        return Err(Error::InvalidShape(format!(
            "maxpool2d needs H, W >= 2, got {h}x{w}"
        )));
    }
    let (oh, ow) = (h / 2, w / 2);
    let out_numel = n * oh * ow * c;
    let traced = x.is_traced();

    let mut out = Vec::with_capacity(out_numel);
    let mut argmax: Vec<usize> = if traced { Vec::with_capacity(out_numel) } else { Vec::new() };
    {
        let xd = x.data();
        for i in 0..n {
            for y in 0..oh {
                for xw in 0..ow {
                    let base = ((i * h + 2 * y) * w + 2 * xw) * c;
                    let offsets = [0, c, w * c, w * c + c];
                    for cc in 0..c {
                        let mut best_idx = base + cc;
                        let mut best = xd[best_idx];
                        for &off in &offsets[1..] {
                            let idx = base + off + cc;
                            if xd[idx] > best {
                                best = xd[idx];
                                best_idx = idx;
                            }
                        }
                        out.push(best);
                        if traced {
                            argmax.push(best_idx);
                        }
                    }
                }
            }
        }
    }

    let out_shape = vec![n, oh, ow, c];
    let node = x.node_rc().map(|parent| {
        let p = alloc::rc::Rc::clone(&parent);
        let in_numel = x.numel();
        Node::op(
            "maxpool2d",
            out_numel,
            vec![parent],
            Box::new(move |g: &[T]| {
                let mut dx = vec![T::ZERO; in_numel];
                for (gi, &src) in g.iter().zip(argmax.iter()) {
                    dx[src] += *gi;
                }
                p.accumulate_owned(dx);
            }),
        )
    });
    Ok(Tensor::from_parts(out_shape, out, node))
}

/// 2x2x2 max pool over `[N, T, H, W, C]`, stride 2 on every axis; the
/// temporal window degrades to 1 when `T == 1`.
pub fn maxpool3d<T: Scalar>(x: &Tensor<T>) -> Result<Tensor<T>> {
    if x.rank() != 5 {
        return Err(Error::InvalidShape(format!(
            "maxpool3d input must be [N, T, H, W, C], got {:?}",
            x.shape()
        )));
    }
    let (n, t, h, w, c) = (
        x.shape()[0],
        x.shape()[1],
        x.shape()[2],
        x.shape()[3],
        x.shape()[4],
    );
    if h < 2 || w < 2 {
        return Err(Error::InvalidShape(format!(
            "maxpool3d needs H, W >= 2, got {h}x{w}"
        )));
    }
    let wt = if t >= 2 { 2 } else { 1 };
    let ot = if t >= 2 { t / 2 } else { 1 };
    let (oh, ow) = (h / 2, w / 2);
    let out_numel = n * ot * oh * ow * c;
    let traced = x.is_traced();

    let mut out = Vec::with_capacity(out_numel);
    let mut argmax: Vec<usize> = if traced { Vec::with_capacity(out_numel) } else { Vec::new() };
    {
        let xd = x.data();
        let frame = h * w * c;
        for i in 0..n {
            for tt in 0..ot {
                for y in 0..oh {
                    for xw in 0..ow {
                        let base = ((i * t + wt * tt) * h + 2 * y) * w * c + 2 * xw * c;
                        for cc in 0..c {
                            let mut best_idx = base + cc;
                            let mut best = xd[best_idx];
                            for dt in 0..wt {
                                for dy in 0..2usize {
                                    for dxw in 0..2usize {
                                        let idx = base + dt * frame + (dy * w + dxw) * c + cc;
                                        if xd[idx] > best {
                                            best = xd[idx];
                                            best_idx = idx;
                                        }
                                    }
                                }
                            }
                            out.push(best);
                            if traced {
                                argmax.push(best_idx);
                            }
                        }
                    }
                }
            }
        }
    }

    let out_shape = vec![n, ot, oh, ow, c];
    let node = x.node_rc().map(|parent| {
        let p = alloc::rc::Rc::clone(&parent);
        let in_numel = x.numel();
        Node::op(
            "maxpool3d",
            out_numel,
            vec![parent],
            Box::new(move |g: &[T]| {
                let mut dx = vec![T::ZERO; in_numel];
                for (gi, &src) in g.iter().zip(argmax.iter()) {
                    dx[src] += *gi;
                }
                p.accumulate_owned(dx);
            }),
        )
    });
    Ok(Tensor::from_parts(out_shape, out, node))
}
