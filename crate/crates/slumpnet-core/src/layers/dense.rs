//! Fully connected layer.

use crate::error::Result;
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

use super::Mode;

/// `y = x @ W + b` with glorot-uniform `W: [in, out]` and zero bias.
pub struct DenseLayer<T: Scalar> {
    pub weight: Tensor<T>,
    pub bias: Tensor<T>,
}

impl<T: Scalar> DenseLayer<T> {
    pub fn new(d_in: usize, d_out: usize, rng: &mut RngStream) -> Result<DenseLayer<T>> {
        Ok(DenseLayer {
            weight: Tensor::glorot_uniform(&[d_in, d_out], d_in, d_out, rng)?.traced(),
            bias: Tensor::zeros(&[d_out])?.traced(),
        })
    }

    pub fn forward(&self, x: &Tensor<T>, mode: Mode) -> Result<Tensor<T>> {
        match mode {
            Mode::Train => x.matmul(&self.weight)?.add(&self.bias),
            Mode::Infer => x.matmul(&self.weight.detached())?.add(&self.bias.detached()),
        }
    }

    pub fn param_count(&self) -> usize {
        self.weight.numel() + self.bias.numel()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_is_affine() {
        let mut rng = RngStream::new(1, 0);
        let layer = DenseLayer::<f64>::new(2, 1, &mut rng).unwrap();
        layer.weight.data_mut().copy_from_slice(&[2.0, -1.0]);
        layer.bias.data_mut().copy_from_slice(&[0.5]);
        let x = Tensor::from_vec(&[2, 2], alloc::vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = layer.forward(&x, Mode::Infer).unwrap();
        assert_eq!(y.to_vec(), alloc::vec![0.5, 2.5]);
    }

    #[test]
    fn param_count_for_regression_head() {
        let mut rng = RngStream::new(1, 0);
        let layer = DenseLayer::<f32>::new(64, 1, &mut rng).unwrap();
        assert_eq!(layer.param_count(), 65);
    }

    #[test]
    fn gradients_flow_to_both_parameters() {
        let mut rng = RngStream::new(2, 0);
        let layer = DenseLayer::<f64>::new(3, 2, &mut rng).unwrap();
        let x = Tensor::<f64>::ones(&[4, 3]).unwrap();
        let y = layer.forward(&x, Mode::Train).unwrap();
        y.sum_all().unwrap().backward().unwrap();
        assert_eq!(layer.weight.grad().unwrap(), alloc::vec![4.0; 6]);
        assert_eq!(layer.bias.grad().unwrap(), alloc::vec![4.0; 2]);
    }
}
