//! The three slump-regression networks.
//!
//! All take a video batch `[N, T, H, W, 3]` and emit one value per clip,
//! `[N, 1]`. Each is three feature blocks followed by global average
//! pooling over time and space and a single dense unit:
//!
//! * `model-a`: per-frame 11x11 convolutions, applied time-distributed.
//! * `model-b`: 3x3x3 spatio-temporal convolutions with 2x2x2 pooling.
//! * `model-c`: a per-frame 3x3 convolution front end, then two
//!   convolutional LSTM blocks that carry state across frames.
//!
//! Blocks widen 16 -> 32 -> 64 channels and each block halves the
//! spatial extent. Convolutions are same-padded so the parameter count
//! is independent of the input size.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::layers::{
    maxpool2d, maxpool3d, time_distributed, BatchNormLayer, Conv2dLayer, Conv3dLayer,
    ConvLstm2dLayer, DenseLayer, Mode,
};
use crate::optim::Param;
use crate::rng::{streams, RngStream};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

pub const INPUT_CHANNELS: usize = 3;
/// Three rounds of 2x2 pooling need at least this much spatial extent.
pub const MIN_SPATIAL: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    A,
    B,
    C,
}

impl ModelId {
    pub fn parse(s: &str) -> Result<ModelId> {
        match s {
            "a" | "A" | "model-a" => Ok(ModelId::A),
            "b" | "B" | "model-b" => Ok(ModelId::B),
            "c" | "C" | "model-c" => Ok(ModelId::C),
            other => Err(Error::InvalidModel(format!(
                "unknown model '{other}', expected one of a, b, c"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelId::A => "model-a",
            ModelId::B => "model-b",
            ModelId::C => "model-c",
        }
    }

    /// Exact trainable parameter count of the published architecture.
    pub fn expected_params(self) -> usize {
        match self {
            ModelId::A => 315_969,
            ModelId::B => 70_817,
            ModelId::C => 277_601,
        }
    }

    /// Stable one-byte tag for serialization.
    pub fn tag(self) -> u8 {
        match self {
            ModelId::A => 1,
            ModelId::B => 2,
            ModelId::C => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Result<ModelId> {
        match tag {
            1 => Ok(ModelId::A),
            2 => Ok(ModelId::B),
            3 => Ok(ModelId::C),
            other => Err(Error::InvalidModel(format!("unknown model tag {other}"))),
        }
    }

    pub fn all() -> [ModelId; 3] {
        [ModelId::A, ModelId::B, ModelId::C]
    }
}

/// A snapshot of one persistent tensor, used for checkpoints.
#[derive(Debug, Clone)]
pub struct CheckpointEntry<T: Scalar> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<T>,
    pub trainable: bool,
}

struct NamedTensor<T: Scalar> {
    name: String,
    tensor: Tensor<T>,
    trainable: bool,
    decay: bool,
}

fn conv_entries<T: Scalar>(
    prefix: &str,
    kernel: &Tensor<T>,
    bias: &Tensor<T>,
    out: &mut Vec<NamedTensor<T>>,
) {
    out.push(NamedTensor {
        name: format!("{prefix}.kernel"),
        tensor: kernel.clone(),
        trainable: true,
        decay: true,
    });
    out.push(NamedTensor {
        name: format!("{prefix}.bias"),
        tensor: bias.clone(),
        trainable: true,
        decay: false,
    });
}

fn bn_entries<T: Scalar>(prefix: &str, bn: &BatchNormLayer<T>, out: &mut Vec<NamedTensor<T>>) {
    out.push(NamedTensor {
        name: format!("{prefix}.gamma"),
        tensor: bn.gamma.clone(),
        trainable: true,
        decay: false,
    });
    out.push(NamedTensor {
        name: format!("{prefix}.beta"),
        tensor: bn.beta.clone(),
        trainable: true,
        decay: false,
    });
    out.push(NamedTensor {
        name: format!("{prefix}.moving_mean"),
        tensor: bn.moving_mean.clone(),
        trainable: false,
        decay: false,
    });
    out.push(NamedTensor {
        name: format!("{prefix}.moving_var"),
        tensor: bn.moving_var.clone(),
        trainable: false,
        decay: false,
    });
}

fn lstm_entries<T: Scalar>(
    prefix: &str,
    lstm: &ConvLstm2dLayer<T>,
    out: &mut Vec<NamedTensor<T>>,
) {
    out.push(NamedTensor {
        name: format!("{prefix}.input_kernel"),
        tensor: lstm.input_kernel.clone(),
        trainable: true,
        decay: true,
    });
    out.push(NamedTensor {
        name: format!("{prefix}.recurrent_kernel"),
        tensor: lstm.recurrent_kernel.clone(),
        trainable: true,
        decay: true,
    });
    out.push(NamedTensor {
        name: format!("{prefix}.bias"),
        tensor: lstm.bias.clone(),
        trainable: true,
        decay: false,
    });
}

fn head_entries<T: Scalar>(head: &DenseLayer<T>, out: &mut Vec<NamedTensor<T>>) {
    out.push(NamedTensor {
        name: "head.weight".to_string(),
        tensor: head.weight.clone(),
        trainable: true,
        decay: true,
    });
    out.push(NamedTensor {
        name: "head.bias".to_string(),
        tensor: head.bias.clone(),
        trainable: true,
        decay: false,
    });
}

fn validate_input<T: Scalar>(x: &Tensor<T>) -> Result<()> {
    let s = x.shape();
    if s.len() != 5 {
        return Err(Error::InvalidShape(format!(
            "expected video batch [N, T, H, W, C], got shape {s:?}"
        )));
    }
    if s[4] != INPUT_CHANNELS {
        return Err(Error::InvalidShape(format!(
            "expected {INPUT_CHANNELS} input channels, got {}",
            s[4]
        )));
    }
    if s[2] < MIN_SPATIAL || s[3] < MIN_SPATIAL {
        return Err(Error::InvalidShape(format!(
            "spatial extent {}x{} is below the {MIN_SPATIAL}x{MIN_SPATIAL} minimum",
            s[2], s[3]
        )));
    }
    Ok(())
}

/// Time-distributed conv block: conv, batch norm, ReLU, 2x2 max pool.
fn frame_conv_block<T: Scalar>(
    x: &Tensor<T>,
    conv: &Conv2dLayer<T>,
    bn: &BatchNormLayer<T>,
    mode: Mode,
) -> Result<Tensor<T>> {
    let y = time_distributed(x, |frames| conv.forward(frames, mode))?;
    let y = bn.forward(&y, mode)?.relu();
    time_distributed(&y, maxpool2d)
}

pub struct ModelA<T: Scalar> {
    pub conv1: Conv2dLayer<T>,
    pub bn1: BatchNormLayer<T>,
    pub conv2: Conv2dLayer<T>,
    pub bn2: BatchNormLayer<T>,
    pub conv3: Conv2dLayer<T>,
    pub bn3: BatchNormLayer<T>,
    pub head: DenseLayer<T>,
}

impl<T: Scalar> ModelA<T> {
    fn new(rng: &mut RngStream) -> Result<ModelA<T>> {
        Ok(ModelA {
            conv1: Conv2dLayer::new(11, INPUT_CHANNELS, 16, 1, rng)?,
            bn1: BatchNormLayer::new(16)?,
            conv2: Conv2dLayer::new(11, 16, 32, 1, rng)?,
            bn2: BatchNormLayer::new(32)?,
            conv3: Conv2dLayer::new(11, 32, 64, 1, rng)?,
            bn3: BatchNormLayer::new(64)?,
            head: DenseLayer::new(64, 1, rng)?,
        })
    }

    fn forward(&self, x: &Tensor<T>, mode: Mode) -> Result<Tensor<T>> {
        validate_input(x)?;
        let y = frame_conv_block(x, &self.conv1, &self.bn1, mode)?;
        let y = frame_conv_block(&y, &self.conv2, &self.bn2, mode)?;
        let y = frame_conv_block(&y, &self.conv3, &self.bn3, mode)?;
        self.head.forward(&y.global_avg_pool()?, mode)
    }

    fn named_tensors(&self) -> Vec<NamedTensor<T>> {
        let mut out = Vec::new();
        conv_entries("block1.conv", &self.conv1.kernel, &self.conv1.bias, &mut out);
        bn_entries("block1.bn", &self.bn1, &mut out);
        conv_entries("block2.conv", &self.conv2.kernel, &self.conv2.bias, &mut out);
        bn_entries("block2.bn", &self.bn2, &mut out);
        conv_entries("block3.conv", &self.conv3.kernel, &self.conv3.bias, &mut out);
        bn_entries("block3.bn", &self.bn3, &mut out);
        head_entries(&self.head, &mut out);
        out
    }
}

pub struct ModelB<T: Scalar> {
    pub conv1: Conv3dLayer<T>,
    pub bn1: BatchNormLayer<T>,
    pub conv2: Conv3dLayer<T>,
    pub bn2: BatchNormLayer<T>,
    pub conv3: Conv3dLayer<T>,
    pub bn3: BatchNormLayer<T>,
    pub head: DenseLayer<T>,
}

impl<T: Scalar> ModelB<T> {
    fn new(rng: &mut RngStream) -> Result<ModelB<T>> {
        Ok(ModelB {
            conv1: Conv3dLayer::new(3, 3, INPUT_CHANNELS, 16, rng)?,
            bn1: BatchNormLayer::new(16)?,
            conv2: Conv3dLayer::new(3, 3, 16, 32, rng)?,
            bn2: BatchNormLayer::new(32)?,
            conv3: Conv3dLayer::new(3, 3, 32, 64, rng)?,
            bn3: BatchNormLayer::new(64)?,
            head: DenseLayer::new(64, 1, rng)?,
        })
    }

    fn forward(&self, x: &Tensor<T>, mode: Mode) -> Result<Tensor<T>> {
        validate_input(x)?;
        let mut y = x.clone();
        for (conv, bn) in [
            (&self.conv1, &self.bn1),
            (&self.conv2, &self.bn2),
            (&self.conv3, &self.bn3),
        ] {
            y = maxpool3d(&bn.forward(&conv.forward(&y, mode)?, mode)?.relu())?;
        }
        self.head.forward(&y.global_avg_pool()?, mode)
    }

    fn named_tensors(&self) -> Vec<NamedTensor<T>> {
        let mut out = Vec::new();
        conv_entries("block1.conv", &self.conv1.kernel, &self.conv1.bias, &mut out);
        bn_entries("block1.bn", &self.bn1, &mut out);
        conv_entries("block2.conv", &self.conv2.kernel, &self.conv2.bias, &mut out);
        bn_entries("block2.bn", &self.bn2, &mut out);
        conv_entries("block3.conv", &self.conv3.kernel, &self.conv3.bias, &mut out);
        bn_entries("block3.bn", &self.bn3, &mut out);
        head_entries(&self.head, &mut out);
        out
    }
}

pub struct ModelC<T: Scalar> {
    pub conv1: Conv2dLayer<T>,
    pub bn1: BatchNormLayer<T>,
    pub lstm2: ConvLstm2dLayer<T>,
    pub bn2: BatchNormLayer<T>,
    pub lstm3: ConvLstm2dLayer<T>,
    pub bn3: BatchNormLayer<T>,
    pub head: DenseLayer<T>,
}

impl<T: Scalar> ModelC<T> {
    fn new(rng: &mut RngStream) -> Result<ModelC<T>> {
        Ok(ModelC {
            conv1: Conv2dLayer::new(3, INPUT_CHANNELS, 16, 1, rng)?,
            bn1: BatchNormLayer::new(16)?,
            lstm2: ConvLstm2dLayer::new(3, 16, 32, rng)?,
            bn2: BatchNormLayer::new(32)?,
            lstm3: ConvLstm2dLayer::new(3, 32, 64, rng)?,
            bn3: BatchNormLayer::new(64)?,
            head: DenseLayer::new(64, 1, rng)?,
        })
    }

    fn forward(&self, x: &Tensor<T>, mode: Mode) -> Result<Tensor<T>> {
        validate_input(x)?;
        let y = frame_conv_block(x, &self.conv1, &self.bn1, mode)?;
        // The LSTM blocks omit ReLU: hidden states are already bounded
        // by the output gate and tanh.
        let y = self.bn2.forward(&self.lstm2.forward(&y, mode)?, mode)?;
        let y = time_distributed(&y, maxpool2d)?;
        let y = self.bn3.forward(&self.lstm3.forward(&y, mode)?, mode)?;
        let y = time_distributed(&y, maxpool2d)?;
        self.head.forward(&y.global_avg_pool()?, mode)
    }

    fn named_tensors(&self) -> Vec<NamedTensor<T>> {
        let mut out = Vec::new();
        conv_entries("block1.conv", &self.conv1.kernel, &self.conv1.bias, &mut out);
        bn_entries("block1.bn", &self.bn1, &mut out);
        lstm_entries("block2.lstm", &self.lstm2, &mut out);
        bn_entries("block2.bn", &self.bn2, &mut out);
        lstm_entries("block3.lstm", &self.lstm3, &mut out);
        bn_entries("block3.bn", &self.bn3, &mut out);
        head_entries(&self.head, &mut out);
        out
    }
}

pub enum Model<T: Scalar> {
    A(ModelA<T>),
    B(ModelB<T>),
    C(ModelC<T>),
}

impl<T: Scalar> Model<T> {
    /// Builds a model with parameters drawn from the dedicated
    /// initialization stream of `seed`. Layers draw in declaration
    /// order, so equal seeds give bit-identical parameters.
    pub fn build(id: ModelId, seed: u64) -> Result<Model<T>> {
        let mut rng = RngStream::new(seed, streams::PARAM_INIT);
        Ok(match id {
            ModelId::A => Model::A(ModelA::new(&mut rng)?),
            ModelId::B => Model::B(ModelB::new(&mut rng)?),
            ModelId::C => Model::C(ModelC::new(&mut rng)?),
        })
    }

    pub fn id(&self) -> ModelId {
        match self {
            Model::A(_) => ModelId::A,
            Model::B(_) => ModelId::B,
            Model::C(_) => ModelId::C,
        }
    }

    /// Predicts slump for a batch of clips: `[N, T, H, W, 3]` -> `[N, 1]`.
    pub fn forward(&self, x: &Tensor<T>, mode: Mode) -> Result<Tensor<T>> {
        match self {
            Model::A(m) => m.forward(x, mode),
            Model::B(m) => m.forward(x, mode),
            Model::C(m) => m.forward(x, mode),
        }
    }

    fn named_tensors(&self) -> Vec<NamedTensor<T>> {
        match self {
            Model::A(m) => m.named_tensors(),
            Model::B(m) => m.named_tensors(),
            Model::C(m) => m.named_tensors(),
        }
    }

    /// Trainable parameters in a stable order.
    pub fn parameters(&self) -> Vec<Param<T>> {
        self.named_tensors()
            .into_iter()
            .filter(|nt| nt.trainable)
            .map(|nt| Param {
                name: nt.name,
                tensor: nt.tensor,
                decay: nt.decay,
            })
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.parameters().iter().map(|p| p.tensor.numel()).sum()
    }

    /// All persistent tensors (parameters plus normalization statistics)
    /// copied out for serialization.
    pub fn state_entries(&self) -> Vec<CheckpointEntry<T>> {
        self.named_tensors()
            .into_iter()
            .map(|nt| CheckpointEntry {
                name: nt.name,
                shape: nt.tensor.shape().to_vec(),
                data: nt.tensor.to_vec(),
                trainable: nt.trainable,
            })
            .collect()
    }

    /// Restores every persistent tensor from `entries`, matching by
    /// name. All tensors must be present with their exact shapes.
    pub fn load_state(&self, entries: &[CheckpointEntry<T>]) -> Result<()> {
        let targets = self.named_tensors();
        if entries.len() != targets.len() {
            return Err(Error::InvalidModel(format!(
                "checkpoint has {} tensors, {} expects {}",
                entries.len(),
                self.id().name(),
                targets.len()
            )));
        }
        for target in &targets {
            let entry = entries
                .iter()
                .find(|e| e.name == target.name)
                .ok_or_else(|| {
                    Error::InvalidModel(format!("checkpoint is missing tensor '{}'", target.name))
                })?;
            if entry.shape != target.tensor.shape() {
                return Err(Error::InvalidModel(format!(
                    "tensor '{}' has shape {:?} in the checkpoint, expected {:?}",
                    entry.name,
                    entry.shape,
                    target.tensor.shape()
                )));
            }
            target.tensor.copy_from_slice(&entry.data)?;
        }
        Ok(())
    }
}
