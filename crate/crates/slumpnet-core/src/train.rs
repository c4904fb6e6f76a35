//! Mini-batch training loop with per-epoch logging.
//!
//! The loss is mean absolute error in centimeters, matching the
//! evaluation metric. Batch order reshuffles every epoch from its own
//! deterministic stream, so a (seed, epoch) pair always yields the same
//! visitation order regardless of how many epochs ran before.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::layers::Mode;
use crate::models::{CheckpointEntry, Model};
use crate::ops::mean_abs_error;
use crate::optim::{AdamW, AdamWConfig};
use crate::rng::{streams, RngStream};
use crate::scalar::Scalar;
use crate::tensor::Tensor;
use alloc::format;

/// Elapsed-seconds source for epoch timestamps.
pub trait Clock {
    fn elapsed_seconds(&self) -> f64;
}

/// Reports 0.0 forever. Used for reproducible logs: two runs of the
/// same configuration must produce byte-identical output, and wall time
/// is the one column that would differ.
pub struct NullClock;

impl Clock for NullClock {
    fn elapsed_seconds(&self) -> f64 {
        0.0
    }
}

#[cfg(feature = "std")]
pub struct WallClock(std::time::Instant);

#[cfg(feature = "std")]
impl WallClock {
    #[allow(clippy::new_without_default)]
    pub fn new() -> WallClock {
        WallClock(std::time::Instant::now())
    }
}

#[cfg(feature = "std")]
impl Clock for WallClock {
    fn elapsed_seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// An in-memory regression dataset: preprocessed clips of one common
/// shape `[T, H, W, C]`, each labeled with a slump in centimeters.
#[derive(Debug, Default)]
pub struct DataSet<T: Scalar> {
    videos: Vec<Tensor<T>>,
    targets: Vec<T>,
}

impl<T: Scalar> DataSet<T> {
    #[allow(clippy::new_without_default)]
    pub fn new() -> DataSet<T> {
        DataSet {
            videos: Vec::new(),
            targets: Vec::new(),
        }
    }

    pub fn push(&mut self, video: Tensor<T>, slump_cm: T) -> Result<()> {
        if video.rank() != 4 {
            return Err(Error::InvalidShape(format!(
                "dataset clips must be [T, H, W, C], got {:?}",
                video.shape()
            )));
        }
        if let Some(first) = self.videos.first() {
            if first.shape() != video.shape() {
                return Err(Error::ShapeMismatch(format!(
                    "clip shape {:?} differs from the dataset's {:?}",
                    video.shape(),
                    first.shape()
                )));
            }
        }
        if !slump_cm.is_finite() {
            return Err(Error::InvalidValue("non-finite slump label".into()));
        }
        self.videos.push(video);
        self.targets.push(slump_cm);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.videos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.videos.is_empty()
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    pub fn target_mean(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::Empty("target_mean of an empty dataset".into()));
        }
        let sum: f64 = self.targets.iter().map(|t| t.to_f64()).sum();
        Ok(sum / self.targets.len() as f64)
    }

    /// Assembles the clips at `indices` into a `[B, T, H, W, C]` batch
    /// and their labels into `[B, 1]`.
    pub fn batch(&self, indices: &[usize]) -> Result<(Tensor<T>, Tensor<T>)> {
        if indices.is_empty() {
            return Err(Error::Empty("batch of no indices".into()));
        }
        let clip_shape = self.videos[indices[0]].shape().to_vec();
        let per = self.videos[indices[0]].numel();
        let mut data = Vec::with_capacity(indices.len() * per);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::InvalidValue(format!(
                    "batch index {i} out of range for {} clips",
                    self.len()
                )));
            }
            data.extend_from_slice(&self.videos[i].data());
            labels.push(self.targets[i]);
        }
        let mut shape = Vec::with_capacity(5);
        shape.push(indices.len());
        shape.extend_from_slice(&clip_shape);
        Ok((
            Tensor::from_vec(&shape, data)?,
            Tensor::from_vec(&[indices.len(), 1], labels)?,
        ))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Seeds the per-epoch shuffle streams.
    pub seed: u64,
    pub optimizer: AdamWConfig,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            epochs: 50,
            batch_size: 16,
            seed: 0,
            optimizer: AdamWConfig::default(),
            shuffle: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EpochRecord {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Sample-weighted mean training loss over the epoch's batches.
    pub train_loss: f64,
    /// Validation MAE, when a validation set was supplied.
    pub val_mae: Option<f64>,
    /// Elapsed seconds at the end of the epoch, per the caller's clock.
    pub seconds: f64,
}

#[derive(Debug)]
pub struct TrainOutcome<T: Scalar> {
    pub log: Vec<EpochRecord>,
    /// Lowest validation MAE seen, with its epoch and a state snapshot.
    pub best_val_mae: Option<f64>,
    pub best_epoch: Option<usize>,
    pub best_state: Option<Vec<CheckpointEntry<T>>>,
    pub final_train_loss: f64,
}

#[derive(Debug, Clone)]
pub struct EvalResult {
    pub mae: f64,
    /// Per-clip `prediction - target`, in dataset order.
    pub residuals: Vec<f64>,
}

/// Runs inference over `ds` in fixed order and reports MAE.
pub fn evaluate<T: Scalar>(
    model: &Model<T>,
    ds: &DataSet<T>,
    batch_size: usize,
) -> Result<EvalResult> {
    if ds.is_empty() {
        return Err(Error::Empty("evaluate on an empty dataset".into()));
    }
    if batch_size == 0 {
        return Err(Error::InvalidValue("batch_size must be positive".into()));
    }
    let indices: Vec<usize> = (0..ds.len()).collect();
    let mut residuals = Vec::with_capacity(ds.len());
    for chunk in indices.chunks(batch_size) {
        let (x, y) = ds.batch(chunk)?;
        let pred = model.forward(&x, Mode::Infer)?;
        let (pd, yd) = (pred.data(), y.data());
        for k in 0..chunk.len() {
            residuals.push(pd[k].to_f64() - yd[k].to_f64());
        }
    }
    let mae = residuals.iter().map(|r| r.abs()).sum::<f64>() / residuals.len() as f64;
    if !mae.is_finite() {
        return Err(Error::NumericFailure("non-finite evaluation MAE".into()));
    }
    Ok(EvalResult { mae, residuals })
}

/// Trains `model` in place and returns the epoch log plus the best
/// validation snapshot (when `val` is given).
pub fn train<T: Scalar>(
    model: &Model<T>,
    train: &DataSet<T>,
    val: Option<&DataSet<T>>,
    cfg: &TrainConfig,
    clock: &dyn Clock,
) -> Result<TrainOutcome<T>> {
    if train.is_empty() {
        return Err(Error::Empty("training set is empty".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::InvalidValue("batch_size must be positive".into()));
    }
    if cfg.epochs == 0 {
        return Err(Error::InvalidValue("epochs must be positive".into()));
    }

    let params = model.parameters();
    let mut opt = AdamW::new(cfg.optimizer, &params);
    let mut log = Vec::with_capacity(cfg.epochs);
    let mut best_val_mae: Option<f64> = None;
    let mut best_epoch = None;
    let mut best_state = None;
    let mut final_train_loss = f64::NAN;

    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 1..=cfg.epochs {
        if cfg.shuffle {
            let mut shuffle_rng = RngStream::new(cfg.seed, streams::shuffle(epoch));
            for i in 0..order.len() {
                order[i] = i;
            }
            shuffle_rng.shuffle(&mut order);
        }

        let mut loss_sum = 0.0f64;
        for chunk in order.chunks(cfg.batch_size) {
            let (x, y) = train.batch(chunk)?;
            let pred = model.forward(&x, Mode::Train)?;
            let loss = mean_abs_error(&pred, &y)?;
            let loss_val = loss.item()?.to_f64();
            if !loss_val.is_finite() {
                return Err(Error::NumericFailure(format!(
                    "non-finite training loss at epoch {epoch}"
                )));
            }
            loss.backward()?;
            opt.step(&params)?;
            loss_sum += loss_val * chunk.len() as f64;
        }
        let train_loss = loss_sum / train.len() as f64;
        final_train_loss = train_loss;

        let val_mae = match val {
            Some(ds) => Some(evaluate(model, ds, cfg.batch_size)?.mae),
            None => None,
        };
        if let Some(mae) = val_mae {
            if best_val_mae.map_or(true, |best| mae < best) {
                best_val_mae = Some(mae);
                best_epoch = Some(epoch);
                best_state = Some(model.state_entries());
            }
        }

        log.push(EpochRecord {
            epoch,
            train_loss,
            val_mae,
            seconds: clock.elapsed_seconds(),
        });
    }

    Ok(TrainOutcome {
        log,
        best_val_mae,
        best_epoch,
        best_state,
        final_train_loss,
    })
}
