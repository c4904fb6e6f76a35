//! Differentiable tensor operations.
//!
//! Binary operations broadcast trailing dimensions: shapes are aligned
//! at their last axis and each pair of extents must match or one of
//! them must be 1. Reductions remove the reduced axes from the shape
//! (a reduction over every axis yields shape `[1]`).
//!
//! Hot call patterns (identical shapes, per-channel vectors, scalars,
//! contiguous axis runs) take specialized single-pass kernels; anything
//! else falls back to a general index-mapped path that is only exercised
//! by small inputs.

use alloc::boxed::Box;
use alloc::format;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;

use crate::autograd::Node;
use crate::error::{Error, Result};
use crate::gemm;
use crate::scalar::Scalar;
use crate::tensor::{check_shape, strides_of, Tensor};

// ---------------------------------------------------------------------
// Broadcasting helpers
// ---------------------------------------------------------------------

/// Output shape of a binary operation under trailing broadcast rules.
pub(crate) fn broadcast_shape(a: &[usize], b: &[usize]) -> Result<Vec<usize>> {
    let rank = a.len().max(b.len());
    let mut out = vec![0usize; rank];
    for i in 0..rank {
        let da = dim_from_end(a, rank - 1 - i);
        let db = dim_from_end(b, rank - 1 - i);
        out[i] = match (da, db) {
            (x, y) if x == y => x,
            (1, y) => y,
            (x, 1) => x,
            (x, y) => {
                return Err(Error::ShapeMismatch(format!(
                    "cannot broadcast {a:?} with {b:?} (extents {x} vs {y})"
                )))
            }
        };
    }
    Ok(out)
}

/// Extent `k` axes from the trailing end, padding with 1.
fn dim_from_end(shape: &[usize], k: usize) -> usize {
    if k < shape.len() {
        shape[shape.len() - 1 - k]
    } else {
        1
    }
}

/// True when `small` (leading 1s ignored) equals the trailing extents of
/// `big`, i.e. indexing reduces to `i % small_numel`.
fn is_trailing_block(small: &[usize], big: &[usize]) -> bool {
    let core: &[usize] = {
        let mut s = small;
        while !s.is_empty() && s[0] == 1 {
            s = &s[1..];
        }
        s
    };
    core.len() <= big.len() && core == &big[big.len() - core.len()..]
}

/// Per-output-axis source strides, 0 on broadcast axes.
fn contrib_strides(src: &[usize], out: &[usize]) -> Vec<usize> {
    let s = strides_of(src);
    let off = out.len() - src.len();
    let mut c = vec![0usize; out.len()];
    for i in 0..src.len() {
        c[off + i] = if src[i] == 1 { 0 } else { s[i] };
    }
    c
}

fn map_index(mut i: usize, out_strides: &[usize], contrib: &[usize]) -> usize {
    let mut idx = 0;
    for d in 0..out_strides.len() {
        let coord = i / out_strides[d];
        i %= out_strides[d];
        idx += coord * contrib[d];
    }
    idx
}

/// Materializes `src` broadcast to `out` shape. General path only.
fn gather_broadcast<T: Scalar>(src: &[T], src_shape: &[usize], out_shape: &[usize]) -> Vec<T> {
    let out_numel = out_shape.iter().product();
    let out_strides = strides_of(out_shape);
    let contrib = contrib_strides(src_shape, out_shape);
    let mut out = Vec::with_capacity(out_numel);
    for i in 0..out_numel {
        out.push(src[map_index(i, &out_strides, &contrib)]);
    }
    out
}

/// Elementwise combine of two broadcast-compatible buffers.
fn apply_bin<T: Scalar, F: Fn(T, T) -> T>(
    f: F,
    a: &[T],
    a_shape: &[usize],
    b: &[T],
    b_shape: &[usize],
    out_shape: &[usize],
) -> Vec<T> {
    let n: usize = out_shape.iter().product();
    if a_shape == b_shape {
        return a.iter().zip(b.iter()).map(|(&x, &y)| f(x, y)).collect();
    }
    if b.len() == 1 {
        let y = b[0];
        return a.iter().map(|&x| f(x, y)).collect();
    }
    if a.len() == 1 {
        let x = a[0];
        return b.iter().map(|&y| f(x, y)).collect();
    }
    if a_shape == out_shape && is_trailing_block(b_shape, a_shape) {
        let bn = b.len();
        return a.iter().enumerate().map(|(i, &x)| f(x, b[i % bn])).collect();
    }
    if b_shape == out_shape && is_trailing_block(a_shape, b_shape) {
        let an = a.len();
        return b.iter().enumerate().map(|(i, &y)| f(a[i % an], y)).collect();
    }
    let av = gather_broadcast(a, a_shape, out_shape);
    let bv = gather_broadcast(b, b_shape, out_shape);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(f(av[i], bv[i]));
    }
    out
}

/// Sums a buffer of shape `from` down to broadcast-source shape `to`.
pub(crate) fn reduce_to_shape<T: Scalar>(g: &[T], from: &[usize], to: &[usize]) -> Vec<T> {
    if from == to {
        return g.to_vec();
    }
    let to_numel: usize = to.iter().product();
    if to_numel == 1 {
        let mut s = T::ZERO;
        for &v in g {
            s += v;
        }
        return vec![s];
    }
    let mut acc = vec![T::ZERO; to_numel];
    if is_trailing_block(to, from) {
        for (i, &v) in g.iter().enumerate() {
            acc[i % to_numel] += v;
        }
        return acc;
    }
    let out_strides = strides_of(from);
    let contrib = contrib_strides(to, from);
    for (i, &v) in g.iter().enumerate() {
        acc[map_index(i, &out_strides, &contrib)] += v;
    }
    acc
}

// ---------------------------------------------------------------------
// Binary elementwise operations
// ---------------------------------------------------------------------

enum BinKind {
    Add,
    Sub,
    Mul,
}

fn binary<T: Scalar>(kind: BinKind, a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    let out_shape = broadcast_shape(a.shape(), b.shape())?;
    let out_data = {
        let ad = a.data();
        let bd = b.data();
        match kind {
            BinKind::Add => apply_bin(|x, y| x + y, &ad, a.shape(), &bd, b.shape(), &out_shape),
            BinKind::Sub => apply_bin(|x, y| x - y, &ad, a.shape(), &bd, b.shape(), &out_shape),
            BinKind::Mul => apply_bin(|x, y| x * y, &ad, a.shape(), &bd, b.shape(), &out_shape),
        }
    };

    let a_node = a.node_rc();
    let b_node = b.node_rc();
    if a_node.is_none() && b_node.is_none() {
        return Tensor::from_vec(&out_shape, out_data);
    }

    let mut parents = Vec::new();
    if let Some(n) = &a_node {
        parents.push(Rc::clone(n));
    }
    if let Some(n) = &b_node {
        parents.push(Rc::clone(n));
    }

    let a_shape = a.shape().to_vec();
    let b_shape = b.shape().to_vec();
    let o_shape = out_shape.clone();
    let numel = out_data.len();

    let backward: Box<dyn Fn(&[T])> = match kind {
        BinKind::Add => Box::new(move |g: &[T]| {
            if let Some(n) = &a_node {
                n.accumulate_owned(reduce_to_shape(g, &o_shape, &a_shape));
            }
            if let Some(n) = &b_node {
                n.accumulate_owned(reduce_to_shape(g, &o_shape, &b_shape));
            }
        }),
        BinKind::Sub => Box::new(move |g: &[T]| {
            if let Some(n) = &a_node {
                n.accumulate_owned(reduce_to_shape(g, &o_shape, &a_shape));
            }
            if let Some(n) = &b_node {
                let mut db = reduce_to_shape(g, &o_shape, &b_shape);
                for v in db.iter_mut() {
                    *v = -*v;
                }
                n.accumulate_owned(db);
            }
        }),
        BinKind::Mul => {
            let a_data = a.data_rc();
            let b_data = b.data_rc();
            Box::new(move |g: &[T]| {
                if let Some(n) = &a_node {
                    let bd = b_data.borrow();
                    let full = apply_bin(|x, y| x * y, g, &o_shape, &bd, &b_shape, &o_shape);
                    n.accumulate_owned(reduce_to_shape(&full, &o_shape, &a_shape));
                }
                if let Some(n) = &b_node {
                    let ad = a_data.borrow();
                    let full = apply_bin(|x, y| x * y, g, &o_shape, &ad, &a_shape, &o_shape);
                    n.accumulate_owned(reduce_to_shape(&full, &o_shape, &b_shape));
                }
            })
        }
    };

    let label = match kind {
        BinKind::Add => "add",
        BinKind::Sub => "sub",
        BinKind::Mul => "mul",
    };
    let node = Node::op(label, numel, parents, backward);
    Ok(Tensor::from_parts(out_shape, out_data, Some(node)))
}

// ---------------------------------------------------------------------
// Unary elementwise operations
// ---------------------------------------------------------------------

/// Unary op whose derivative is a function of the *input* value.
fn unary_from_input<T, F, D>(label: &'static str, x: &Tensor<T>, f: F, df: D) -> Tensor<T>
where
    T: Scalar,
    F: Fn(T) -> T,
    D: Fn(T) -> T + 'static,
{
    let out_data: Vec<T> = x.data().iter().map(|&v| f(v)).collect();
    let numel = out_data.len();
    let node = x.node_rc().map(|parent| {
        let x_data = x.data_rc();
        let p = Rc::clone(&parent);
        Node::op(
            label,
            numel,
            vec![parent],
            Box::new(move |g: &[T]| {
                let xd = x_data.borrow();
                let dx: Vec<T> = g.iter().zip(xd.iter()).map(|(&gi, &xi)| gi * df(xi)).collect();
                p.accumulate_owned(dx);
            }),
        )
    });
    Tensor::from_parts(x.shape().to_vec(), out_data, node)
}

/// Unary op whose derivative is a function of the *output* value.
fn unary_from_output<T, F, D>(label: &'static str, x: &Tensor<T>, f: F, dfy: D) -> Tensor<T>
where
    T: Scalar,
    F: Fn(T) -> T,
    D: Fn(T) -> T + 'static,
{
    let out_data: Vec<T> = x.data().iter().map(|&v| f(v)).collect();
    let numel = out_data.len();
    let out = Tensor::from_parts(x.shape().to_vec(), out_data, None);
    let node = x.node_rc().map(|parent| {
        let y_data = out.data_rc();
        let p = Rc::clone(&parent);
        Node::op(
            label,
            numel,
            vec![parent],
            Box::new(move |g: &[T]| {
                let yd = y_data.borrow();
                let dx: Vec<T> = g.iter().zip(yd.iter()).map(|(&gi, &yi)| gi * dfy(yi)).collect();
                p.accumulate_owned(dx);
            }),
        )
    });
    out.with_node(node)
}

impl<T: Scalar> Tensor<T> {
    pub fn add(&self, rhs: &Tensor<T>) -> Result<Tensor<T>> {
        binary(BinKind::Add, self, rhs)
    }

    pub fn sub(&self, rhs: &Tensor<T>) -> Result<Tensor<T>> {
        binary(BinKind::Sub, self, rhs)
    }

    pub fn mul(&self, rhs: &Tensor<T>) -> Result<Tensor<T>> {
        binary(BinKind::Mul, self, rhs)
    }

    /// Rectified linear unit; the subgradient at 0 is 0.
    pub fn relu(&self) -> Tensor<T> {
        unary_from_input(
            "relu",
            self,
            |v| if v > T::ZERO { v } else { T::ZERO },
            |v| if v > T::ZERO { T::ONE } else { T::ZERO },
        )
    }

    /// Logistic sigmoid.
    pub fn sigmoid(&self) -> Tensor<T> {
        unary_from_output("sigmoid", self, |v| v.sigmoid(), |y| y * (T::ONE - y))
    }

    /// Hyperbolic tangent.
    pub fn tanh(&self) -> Tensor<T> {
        unary_from_output("tanh", self, |v| v.tanh(), |y| T::ONE - y * y)
    }

    /// Elementwise square root.
    pub fn sqrt(&self) -> Tensor<T> {
        let half = T::from_f64(0.5);
        unary_from_output("sqrt", self, |v| v.sqrt(), move |y| half / y)
    }

    /// Elementwise reciprocal.
    pub fn recip(&self) -> Tensor<T> {
        unary_from_output("recip", self, |v| T::ONE / v, |y| -(y * y))
    }

    /// Elementwise absolute value; the subgradient at 0 is 0.
    pub fn abs(&self) -> Tensor<T> {
        unary_from_input(
            "abs",
            self,
            |v| v.abs(),
            |v| {
                if v > T::ZERO {
                    T::ONE
                } else if v < T::ZERO {
                    -T::ONE
                } else {
                    T::ZERO
                }
            },
        )
    }

    pub fn neg(&self) -> Tensor<T> {
        unary_from_input("neg", self, |v| -v, |_| -T::ONE)
    }

    /// Multiplies every element by a constant.
    pub fn scale(&self, c: T) -> Tensor<T> {
        unary_from_input("scale", self, |v| v * c, move |_| c)
    }

    /// Adds a constant to every element.
    pub fn add_scalar(&self, c: T) -> Tensor<T> {
        unary_from_input("add_scalar", self, |v| v + c, |_| T::ONE)
    }

    // -----------------------------------------------------------------
    // Reductions
    // -----------------------------------------------------------------

    pub fn sum_axes(&self, axes: &[usize]) -> Result<Tensor<T>> {
        reduce(self, axes, false)
    }

    pub fn mean_axes(&self, axes: &[usize]) -> Result<Tensor<T>> {
        reduce(self, axes, true)
    }

    pub fn sum_all(&self) -> Result<Tensor<T>> {
        let axes: Vec<usize> = (0..self.rank()).collect();
        reduce(self, &axes, false)
    }

    pub fn mean_all(&self) -> Result<Tensor<T>> {
        let axes: Vec<usize> = (0..self.rank()).collect();
        reduce(self, &axes, true)
    }

    /// Mean over every axis except the first and the last. Maps
    /// `[N, T, H, W, C]` activations to `[N, C]` descriptors.
    pub fn global_avg_pool(&self) -> Result<Tensor<T>> {
        if self.rank() < 3 {
            return Err(Error::InvalidShape(format!(
                "global_avg_pool needs rank >= 3, shape is {:?}",
                self.shape()
            )));
        }
        let axes: Vec<usize> = (1..self.rank() - 1).collect();
        reduce(self, &axes, true)
    }

    // -----------------------------------------------------------------
    // Shape manipulation
    // -----------------------------------------------------------------

    /// Reinterprets the buffer under a new shape with equal element
    /// count. Shares the data; no copy happens.
    pub fn reshape(&self, shape: &[usize]) -> Result<Tensor<T>> {
        let numel = check_shape(shape)?;
        if numel != self.numel() {
            return Err(Error::ShapeMismatch(format!(
                "cannot reshape {:?} ({} elements) to {shape:?} ({numel})",
                self.shape(),
                self.numel()
            )));
        }
        let node = self.node_rc().map(|parent| {
            let p = Rc::clone(&parent);
            Node::op(
                "reshape",
                numel,
                vec![parent],
                Box::new(move |g: &[T]| p.accumulate(g)),
            )
        });
        Ok(Tensor::from_shared(shape.to_vec(), self.data_rc(), node))
    }

    /// Extracts `len` consecutive slices along `axis` starting at `start`.
    pub fn narrow(&self, axis: usize, start: usize, len: usize) -> Result<Tensor<T>> {
        let shape = self.shape();
        if axis >= shape.len() {
            return Err(Error::InvalidAxis(format!(
                "narrow axis {axis} out of range for shape {shape:?}"
            )));
        }
        if len == 0 || start + len > shape[axis] {
            return Err(Error::InvalidAxis(format!(
                "narrow range {start}..{} exceeds extent {} on axis {axis}",
                start + len,
                shape[axis]
            )));
        }
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let extent = shape[axis];
        let mut out_shape = shape.to_vec();
        out_shape[axis] = len;
        let block = len * inner;

        let mut out = Vec::with_capacity(outer * block);
        {
            let data = self.data();
            for o in 0..outer {
                let src = (o * extent + start) * inner;
                out.extend_from_slice(&data[src..src + block]);
            }
        }

        let in_numel = self.numel();
        let node = self.node_rc().map(|parent| {
            let p = Rc::clone(&parent);
            Node::op(
                "narrow",
                outer * block,
                vec![parent],
                Box::new(move |g: &[T]| {
                    let mut dx = vec![T::ZERO; in_numel];
                    for o in 0..outer {
                        let dst = (o * extent + start) * inner;
                        dx[dst..dst + block].copy_from_slice(&g[o * block..(o + 1) * block]);
                    }
                    p.accumulate_owned(dx);
                }),
            )
        });
        Ok(Tensor::from_parts(out_shape, out, node))
    }
}

fn reduce<T: Scalar>(x: &Tensor<T>, axes: &[usize], mean: bool) -> Result<Tensor<T>> {
    let shape = x.shape().to_vec();
    if axes.is_empty() {
        return Err(Error::InvalidAxis("reduction needs at least one axis".into()));
    }
    let mut sorted = axes.to_vec();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::InvalidAxis(format!("duplicate reduction axis {}", pair[0])));
        }
    }
    if let Some(&bad) = sorted.iter().find(|&&a| a >= shape.len()) {
        return Err(Error::InvalidAxis(format!(
            "axis {bad} out of range for shape {shape:?}"
        )));
    }

    let mut out_shape: Vec<usize> = Vec::new();
    for (d, &e) in shape.iter().enumerate() {
        if !sorted.contains(&d) {
            out_shape.push(e);
        }
    }
    if out_shape.is_empty() {
        out_shape.push(1);
    }
    let out_numel: usize = out_shape.iter().product();
    let red_n: usize = sorted.iter().map(|&a| shape[a]).product();
    let scale = if mean {
        T::ONE / T::from_usize(red_n)
    } else {
        T::ONE
    };

    // Contiguous axis runs admit a closed-form index map.
    let contiguous = sorted.windows(2).all(|w| w[1] == w[0] + 1);
    let plan = if contiguous {
        let lo = sorted[0];
        let hi = sorted[sorted.len() - 1] + 1;
        let mid_n: usize = shape[lo..hi].iter().product();
        let suffix_n: usize = shape[hi..].iter().product();
        ReducePlan::Run { mid_n, suffix_n }
    } else {
        let in_strides = strides_of(&shape);
        let out_strides = strides_of(&out_shape);
        let mut contrib = vec![0usize; shape.len()];
        let mut pos = 0;
        for d in 0..shape.len() {
            if !sorted.contains(&d) {
                contrib[d] = out_strides[pos];
                pos += 1;
            }
        }
        ReducePlan::General { in_strides, contrib }
    };

    let mut out = vec![T::ZERO; out_numel];
    {
        let data = x.data();
        plan.for_each(data.len(), |i, oi| out[oi] += data[i]);
    }
    if mean {
        for v in out.iter_mut() {
            *v *= scale;
        }
    }

    let in_numel = x.numel();
    let node = x.node_rc().map(|parent| {
        let p = Rc::clone(&parent);
        Node::op(
            if mean { "mean" } else { "sum" },
            out_numel,
            vec![parent],
            Box::new(move |g: &[T]| {
                let mut dx = vec![T::ZERO; in_numel];
                plan.for_each(in_numel, |i, oi| dx[i] = g[oi] * scale);
                p.accumulate_owned(dx);
            }),
        )
    });
    Ok(Tensor::from_parts(out_shape, out, node))
}

/// Index map from input linear index to reduced output index.
enum ReducePlan {
    /// Reduced axes form one contiguous run.
    Run { mid_n: usize, suffix_n: usize },
    /// Arbitrary axes: full stride decomposition.
    General {
        in_strides: Vec<usize>,
        contrib: Vec<usize>,
    },
}

impl ReducePlan {
    fn for_each<F: FnMut(usize, usize)>(&self, in_numel: usize, mut f: F) {
        match self {
            ReducePlan::Run { mid_n, suffix_n } => {
                let chunk = mid_n * suffix_n;
                for i in 0..in_numel {
                    let oi = (i / chunk) * suffix_n + i % suffix_n;
                    f(i, oi);
                }
            }
            ReducePlan::General { in_strides, contrib } => {
                for i in 0..in_numel {
                    f(i, map_index(i, in_strides, contrib));
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// Matrix multiplication
// ---------------------------------------------------------------------

impl<T: Scalar> Tensor<T> {
    /// `[n, k] @ [k, m] -> [n, m]`.
    pub fn matmul(&self, rhs: &Tensor<T>) -> Result<Tensor<T>> {
        if self.rank() != 2 || rhs.rank() != 2 {
            return Err(Error::InvalidShape(format!(
                "matmul needs rank-2 operands, got {:?} and {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let (n, k) = (self.shape()[0], self.shape()[1]);
        let (k2, m) = (rhs.shape()[0], rhs.shape()[1]);
        if k != k2 {
            return Err(Error::ShapeMismatch(format!(
                "matmul inner extents differ: {:?} vs {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let out = {
            let a = self.data();
            let b = rhs.data();
            gemm::matmul_nn(&a, &b, n, k, m)
        };

        let a_node = self.node_rc();
        let b_node = rhs.node_rc();
        if a_node.is_none() && b_node.is_none() {
            return Tensor::from_vec(&[n, m], out);
        }
        let mut parents = Vec::new();
        if let Some(nd) = &a_node {
            parents.push(Rc::clone(nd));
        }
        if let Some(nd) = &b_node {
            parents.push(Rc::clone(nd));
        }
        let a_data = self.data_rc();
        let b_data = rhs.data_rc();
        let node = Node::op(
            "matmul",
            n * m,
            parents,
            Box::new(move |g: &[T]| {
                if let Some(nd) = &a_node {
                    let b = b_data.borrow();
                    nd.accumulate_owned(gemm::matmul_nt(g, &b, n, m, k));
                }
                if let Some(nd) = &b_node {
                    let a = a_data.borrow();
                    nd.accumulate_owned(gemm::matmul_tn(&a, g, n, k, m));
                }
            }),
        );
        Ok(Tensor::from_parts(vec![n, m], out, Some(node)))
    }
}

// ---------------------------------------------------------------------
// Stacking along a new time axis
// ---------------------------------------------------------------------

/// Stacks `parts` (all of shape `[N, rest..]`) into `[N, P, rest..]`.
///
/// Inverse of slicing a sequence tensor per step; used to reassemble
/// recurrent-layer outputs.
pub fn stack_time<T: Scalar>(parts: &[Tensor<T>]) -> Result<Tensor<T>> {
    if parts.is_empty() {
        return Err(Error::InvalidShape("stack_time needs at least one part".into()));
    }
    let first = parts[0].shape().to_vec();
    if first.is_empty() {
        return Err(Error::InvalidShape("stack_time parts must have rank >= 1".into()));
    }
    for p in parts {
        if p.shape() != first.as_slice() {
            return Err(Error::ShapeMismatch(format!(
                "stack_time parts disagree: {:?} vs {:?}",
                first,
                p.shape()
            )));
        }
    }
    let n = first[0];
    let rest: usize = first[1..].iter().product();
    let steps = parts.len();
    let mut out_shape = Vec::with_capacity(first.len() + 1);
    out_shape.push(n);
    out_shape.push(steps);
    out_shape.extend_from_slice(&first[1..]);

    let mut out = vec![T::ZERO; n * steps * rest];
    for (t, part) in parts.iter().enumerate() {
        let d = part.data();
        for i in 0..n {
            let dst = (i * steps + t) * rest;
            out[dst..dst + rest].copy_from_slice(&d[i * rest..(i + 1) * rest]);
        }
    }

    let part_nodes: Vec<_> = parts.iter().map(|p| p.node_rc()).collect();
    if part_nodes.iter().all(|n| n.is_none()) {
        return Tensor::from_vec(&out_shape, out);
    }
    let parents: Vec<_> = part_nodes.iter().flatten().map(Rc::clone).collect();
    let numel = out.len();
    let node = Node::op(
        "stack_time",
        numel,
        parents,
        Box::new(move |g: &[T]| {
            for (t, pn) in part_nodes.iter().enumerate() {
                if let Some(pn) = pn {
                    let mut dp = vec![T::ZERO; n * rest];
                    for i in 0..n {
                        let src = (i * steps + t) * rest;
                        dp[i * rest..(i + 1) * rest].copy_from_slice(&g[src..src + rest]);
                    }
                    pn.accumulate_owned(dp);
                }
            }
        }),
    );
    Ok(Tensor::from_parts(out_shape, out, Some(node)))
}

// ---------------------------------------------------------------------
// Loss
// ---------------------------------------------------------------------

/// Mean absolute error between two tensors of identical shape.
///
/// Broadcasting is deliberately rejected here: a silently broadcast
/// `[N]` target against `[N, 1]` predictions would produce an `[N, N]`
/// error surface.
pub fn mean_abs_error<T: Scalar>(pred: &Tensor<T>, target: &Tensor<T>) -> Result<Tensor<T>> {
    if pred.shape() != target.shape() {
        return Err(Error::ShapeMismatch(format!(
            "mean_abs_error needs identical shapes, got {:?} vs {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    pred.sub(target)?.abs().mean_all()
}
