//! Dense row-major tensors with optional gradient tracing.
//!
//! A tensor is a shape plus a shared, interior-mutable buffer. Cloning
//! is cheap and aliases the data; operations in [`crate::ops`] return
//! fresh tensors. A *traced* tensor additionally carries a node in the
//! gradient graph; model parameters are traced leaves that persist
//! across training steps.

use alloc::format;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::{Ref, RefCell, RefMut};

use crate::autograd::{run_backward, Node};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scalar::{DType, Scalar};

/// Validates a shape and returns its element count.
///
/// Ranks from 1 to 8 are supported; every extent must be positive and
/// the product must not overflow.
pub(crate) fn check_shape(shape: &[usize]) -> Result<usize> {
    if shape.is_empty() || shape.len() > 8 {
        return Err(Error::InvalidShape(format!(
            "rank must be between 1 and 8, got shape {shape:?}"
        )));
    }
    let mut numel: usize = 1;
    for &d in shape {
        if d == 0 {
            return Err(Error::InvalidShape(format!("zero extent in shape {shape:?}")));
        }
        numel = numel
            .checked_mul(d)
            .ok_or_else(|| Error::InvalidShape(format!("shape {shape:?} overflows usize")))?;
    }
    Ok(numel)
}

/// Row-major strides for a shape.
pub(crate) fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    strides
}

/// A dense tensor of `T` elements.
pub struct Tensor<T: Scalar = f32> {
    shape: Vec<usize>,
    data: Rc<RefCell<Vec<T>>>,
    node: Option<Rc<Node<T>>>,
}

impl<T: Scalar> Clone for Tensor<T> {
    fn clone(&self) -> Self {
        Tensor {
            shape: self.shape.clone(),
            data: Rc::clone(&self.data),
            node: self.node.clone(),
        }
    }
}

impl<T: Scalar> Tensor<T> {
    /// Wraps an owned buffer. Fails if the shape is invalid or the
    /// buffer length does not match.
    pub fn from_vec(shape: &[usize], data: Vec<T>) -> Result<Tensor<T>> {
        let numel = check_shape(shape)?;
        if data.len() != numel {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} holds {numel} elements but buffer has {}",
                data.len()
            )));
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data: Rc::new(RefCell::new(data)),
            node: None,
        })
    }

    pub(crate) fn from_parts(
        shape: Vec<usize>,
        data: Vec<T>,
        node: Option<Rc<Node<T>>>,
    ) -> Tensor<T> {
        debug_assert_eq!(check_shape(&shape).unwrap(), data.len());
        Tensor {
            shape,
            data: Rc::new(RefCell::new(data)),
            node,
        }
    }

    /// Aliases an existing buffer under a new shape (used by reshape).
    pub(crate) fn from_shared(
        shape: Vec<usize>,
        data: Rc<RefCell<Vec<T>>>,
        node: Option<Rc<Node<T>>>,
    ) -> Tensor<T> {
        debug_assert_eq!(check_shape(&shape).unwrap(), data.borrow().len());
        Tensor { shape, data, node }
    }

    pub fn zeros(shape: &[usize]) -> Result<Tensor<T>> {
        let numel = check_shape(shape)?;
        Tensor::from_vec(shape, vec![T::ZERO; numel])
    }

    pub fn ones(shape: &[usize]) -> Result<Tensor<T>> {
        let numel = check_shape(shape)?;
        Tensor::from_vec(shape, vec![T::ONE; numel])
    }

    pub fn full(shape: &[usize], value: T) -> Result<Tensor<T>> {
        let numel = check_shape(shape)?;
        Tensor::from_vec(shape, vec![value; numel])
    }

    /// Uniform fill over `[lo, hi)`.
    pub fn uniform(shape: &[usize], lo: f64, hi: f64, rng: &mut RngStream) -> Result<Tensor<T>> {
        if !(lo < hi) {
            return Err(Error::InvalidValue(format!("uniform bounds [{lo}, {hi}) are empty")));
        }
        let numel = check_shape(shape)?;
        Tensor::from_vec(shape, rng.uniform_vec(numel, lo, hi))
    }

    /// He-uniform fill: `U(-l, l)` with `l = sqrt(6 / fan_in)`.
    /// The standard choice ahead of ReLU nonlinearities.
    pub fn he_uniform(shape: &[usize], fan_in: usize, rng: &mut RngStream) -> Result<Tensor<T>> {
        if fan_in == 0 {
            return Err(Error::InvalidValue("he_uniform requires fan_in > 0".into()));
        }
        let limit = libm::sqrt(6.0 / fan_in as f64);
        Tensor::uniform(shape, -limit, limit, rng)
    }

    /// Glorot-uniform fill: `U(-l, l)` with `l = sqrt(6 / (fan_in + fan_out))`.
    pub fn glorot_uniform(
        shape: &[usize],
        fan_in: usize,
        fan_out: usize,
        rng: &mut RngStream,
    ) -> Result<Tensor<T>> {
        if fan_in + fan_out == 0 {
            return Err(Error::InvalidValue(
                "glorot_uniform requires fan_in + fan_out > 0".into(),
            ));
        }
        let limit = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
        Tensor::uniform(shape, -limit, limit, rng)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn numel(&self) -> usize {
        self.data.borrow().len()
    }

    pub fn dtype(&self) -> DType {
        T::DTYPE
    }

    /// Borrow of the underlying buffer.
    pub fn data(&self) -> Ref<'_, [T]> {
        Ref::map(self.data.borrow(), |v| v.as_slice())
    }

    pub(crate) fn data_mut(&self) -> RefMut<'_, [T]> {
        RefMut::map(self.data.borrow_mut(), |v| v.as_mut_slice())
    }

    pub(crate) fn data_rc(&self) -> Rc<RefCell<Vec<T>>> {
        Rc::clone(&self.data)
    }

    /// Copy of the underlying buffer.
    pub fn to_vec(&self) -> Vec<T> {
        self.data.borrow().clone()
    }

    /// Overwrites the buffer in place; shape is untouched.
    pub fn copy_from_slice(&self, src: &[T]) -> Result<()> {
        let mut data = self.data.borrow_mut();
        if data.len() != src.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot copy {} elements into tensor of {}",
                src.len(),
                data.len()
            )));
        }
        data.copy_from_slice(src);
        Ok(())
    }

    /// The single value of a one-element tensor.
    pub fn item(&self) -> Result<T> {
        let data = self.data.borrow();
        if data.len() != 1 {
            return Err(Error::InvalidShape(format!(
                "item() needs a one-element tensor, shape is {:?}",
                self.shape
            )));
        }
        Ok(data[0])
    }

    /// True if any element is NaN or infinite.
    pub fn has_non_finite(&self) -> bool {
        self.data.borrow().iter().any(|v| !v.is_finite())
    }

    /// Marks this tensor as a gradient-graph leaf. No-op when already
    /// traced.
    pub fn traced(mut self) -> Tensor<T> {
        if self.node.is_none() {
            self.node = Some(Node::leaf(self.numel()));
        }
        self
    }

    /// A view of the same buffer outside the gradient graph. Updates to
    /// the buffer (for example optimizer steps) stay visible.
    pub fn detached(&self) -> Tensor<T> {
        Tensor {
            shape: self.shape.clone(),
            data: Rc::clone(&self.data),
            node: None,
        }
    }

    pub fn is_traced(&self) -> bool {
        self.node.is_some()
    }

    pub(crate) fn node_rc(&self) -> Option<Rc<Node<T>>> {
        self.node.clone()
    }

    pub(crate) fn with_node(mut self, node: Option<Rc<Node<T>>>) -> Tensor<T> {
        self.node = node;
        self
    }

    /// Copy of the accumulated gradient, if any.
    pub fn grad(&self) -> Option<Vec<T>> {
        self.node.as_ref().and_then(|n| n.grad_clone())
    }

    /// Removes and returns the accumulated gradient.
    pub fn take_grad(&self) -> Option<Vec<T>> {
        self.node.as_ref().and_then(|n| n.take_grad())
    }

    /// Drops any accumulated gradient.
    pub fn zero_grad(&self) {
        if let Some(n) = &self.node {
            n.take_grad();
        }
    }

    /// Backpropagates from a traced one-element tensor, seeding with 1.
    pub fn backward(&self) -> Result<()> {
        let node = self.node.as_ref().ok_or_else(|| {
            Error::InvalidLoss("backward() on an untraced tensor; no graph was recorded".into())
        })?;
        if self.numel() != 1 {
            return Err(Error::InvalidLoss(format!(
                "backward() needs a scalar loss, shape is {:?}",
                self.shape
            )));
        }
        run_backward(node, vec![T::ONE]);
        Ok(())
    }

    /// True when this tensor is a traced leaf (a parameter).
    pub fn is_leaf(&self) -> bool {
        self.node.as_ref().map(|n| n.is_leaf()).unwrap_or(false)
    }
}

impl<T: Scalar> core::fmt::Debug for Tensor<T> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Tensor")
            .field("shape", &self.shape)
            .field("dtype", &T::DTYPE)
            .field("traced", &self.is_traced())
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_vec_checks_length() {
        let err = Tensor::<f32>::from_vec(&[2, 3], vec![0.0; 5]).unwrap_err();
        assert_eq!(err.kind(), "shape-mismatch");
    }

    #[test]
    fn zero_extent_is_rejected() {
        let err = Tensor::<f32>::zeros(&[2, 0, 3]).unwrap_err();
        assert_eq!(err.kind(), "invalid-shape");
    }

    #[test]
    fn rank_zero_is_rejected() {
        let err = Tensor::<f32>::zeros(&[]).unwrap_err();
        assert_eq!(err.kind(), "invalid-shape");
    }

    #[test]
    fn overflowing_shape_is_rejected() {
        let err = Tensor::<f32>::zeros(&[usize::MAX, 2]).unwrap_err();
        assert_eq!(err.kind(), "invalid-shape");
    }

    #[test]
    fn zeros_and_ones() {
        let z = Tensor::<f64>::zeros(&[2, 2]).unwrap();
        assert!(z.data().iter().all(|&v| v == 0.0));
        let o = Tensor::<f64>::ones(&[4]).unwrap();
        assert!(o.data().iter().all(|&v| v == 1.0));
        assert_eq!(o.numel(), 4);
    }

    #[test]
    fn uniform_mean_is_centered() {
        let mut rng = RngStream::new(7, 0);
        let t = Tensor::<f64>::uniform(&[1000], 0.0, 1.0, &mut rng).unwrap();
        let mean = t.data().iter().sum::<f64>() / 1000.0;
        assert!((0.45..=0.55).contains(&mean), "mean {mean}");
    }

    #[test]
    fn he_uniform_respects_limit_and_spreads() {
        let mut rng = RngStream::new(1, 0);
        let fan_in = 27;
        let limit = (6.0f64 / fan_in as f64).sqrt();
        let t = Tensor::<f32>::he_uniform(&[3, 3, 3, 8], fan_in, &mut rng).unwrap();
        assert!(t.data().iter().all(|&v| (v as f64).abs() <= limit));
        let spread = t.data().iter().filter(|&&v| v.abs() > 0.1).count();
        assert!(spread > 0, "values collapsed near zero");
    }

    #[test]
    fn glorot_uniform_respects_limit() {
        let mut rng = RngStream::new(1, 0);
        let limit = (6.0f64 / (64 + 1) as f64).sqrt();
        let t = Tensor::<f32>::glorot_uniform(&[64, 1], 64, 1, &mut rng).unwrap();
        assert!(t.data().iter().all(|&v| (v as f64).abs() <= limit));
    }

    #[test]
    fn init_is_deterministic_per_stream() {
        let a = Tensor::<f32>::uniform(&[32], -1.0, 1.0, &mut RngStream::new(9, 4)).unwrap();
        let b = Tensor::<f32>::uniform(&[32], -1.0, 1.0, &mut RngStream::new(9, 4)).unwrap();
        assert_eq!(a.to_vec(), b.to_vec());
    }

    #[test]
    fn clone_aliases_data() {
        let t = Tensor::<f32>::zeros(&[3]).unwrap();
        let u = t.clone();
        t.data_mut()[1] = 5.0;
        assert_eq!(u.to_vec(), vec![0.0, 5.0, 0.0]);
    }

    #[test]
    fn detached_shares_buffer_without_graph() {
        let t = Tensor::<f32>::ones(&[2]).unwrap().traced();
        let d = t.detached();
        assert!(t.is_traced() && !d.is_traced());
        t.data_mut()[0] = 3.0;
        assert_eq!(d.to_vec(), vec![3.0, 1.0]);
    }

    #[test]
    fn backward_rejects_untraced_and_non_scalar() {
        let plain = Tensor::<f32>::ones(&[1]).unwrap();
        assert_eq!(plain.backward().unwrap_err().kind(), "invalid-loss");
        let vector = Tensor::<f32>::ones(&[2]).unwrap().traced();
        assert_eq!(vector.backward().unwrap_err().kind(), "invalid-loss");
    }

    #[test]
    fn strides_are_row_major() {
        assert_eq!(strides_of(&[2, 3, 4]), vec![12, 4, 1]);
        assert_eq!(strides_of(&[5]), vec![1]);
    }
}
