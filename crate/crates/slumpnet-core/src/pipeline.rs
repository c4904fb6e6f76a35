//! Preprocessing from raw footage to model-ready windows.
//!
//! A clip flows through: optional frame-rate decimation, selection of
//! the final seconds (the mix is most informative once blending has
//! settled), splitting into fixed-length non-overlapping windows, and
//! per-window bilinear resize with rescale to [0, 1]. A circular region
//! of interest can then zero out everything outside the drum opening.
//!
//! Each window becomes one training sample carrying its clip's label.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synth::VideoClip;
use crate::tensor::Tensor;

/// Circular region of interest in resolution-independent units:
/// `center_y`/`center_x` are fractions of the frame height and width,
/// `radius` is a fraction of the smaller frame side.
#[derive(Debug, Clone, Copy)]
pub struct RoiSpec {
    pub center_y: f64,
    pub center_x: f64,
    pub radius: f64,
}

impl Default for RoiSpec {
    fn default() -> RoiSpec {
        RoiSpec {
            center_y: 0.5,
            center_x: 0.5,
            radius: 0.48,
        }
    }
}

impl RoiSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        if !(ok(self.center_y) && ok(self.center_x)) || !self.radius.is_finite()
            || self.radius <= 0.0
            || self.radius > 1.0
        {
            return Err(Error::InvalidRoi(format!(
                "roi center ({}, {}) radius {} is outside the unit frame",
                self.center_y, self.center_x, self.radius
            )));
        }
        Ok(())
    }
}

/// Whether pixel `(y, x)` of an `h` by `w` frame falls inside the
/// region. The one predicate shared by masking and by anything that
/// needs to agree with it.
pub fn roi_contains(roi: &RoiSpec, h: usize, w: usize, y: usize, x: usize) -> bool {
    let dy = ((y as f64 + 0.5) / h as f64 - roi.center_y) * h as f64;
    let dx = ((x as f64 + 0.5) / w as f64 - roi.center_x) * w as f64;
    let r = roi.radius * h.min(w) as f64;
    dy * dy + dx * dx <= r * r
}

fn frames_for_seconds(seconds: f64, fps: u32, what: &str) -> Result<usize> {
    if !seconds.is_finite() || seconds <= 0.0 {
        return Err(Error::InvalidValue(format!(
            "{what} of {seconds} seconds is not positive"
        )));
    }
    let n = libm::round(seconds * fps as f64) as usize;
    if n == 0 {
        return Err(Error::InvalidValue(format!(
            "{what} of {seconds} seconds is under one frame at {fps} fps"
        )));
    }
    Ok(n)
}

/// Decimates the clip to `target_fps` by index mapping. Only
/// downsampling is supported; the target must not exceed the source.
pub fn resample_fps(clip: &VideoClip, target_fps: u32) -> Result<VideoClip> {
    if target_fps == 0 || target_fps > clip.fps {
        return Err(Error::InvalidValue(format!(
            "cannot resample {} fps footage to {} fps",
            clip.fps, target_fps
        )));
    }
    if target_fps == clip.fps {
        return Ok(clip.clone());
    }
    let out_frames = clip.frames * target_fps as usize / clip.fps as usize;
    if out_frames == 0 {
        return Err(Error::TooShort(format!(
            "{} frames at {} fps vanish at {} fps",
            clip.frames, clip.fps, target_fps
        )));
    }
    let per = clip.height * clip.width * VideoClip::CHANNELS;
    let mut data = Vec::with_capacity(out_frames * per);
    for i in 0..out_frames {
        let src = i * clip.fps as usize / target_fps as usize;
        data.extend_from_slice(clip.frame(src));
    }
    Ok(VideoClip {
        frames: out_frames,
        height: clip.height,
        width: clip.width,
        fps: target_fps,
        data,
    })
}

/// Keeps only the last `seconds` of the clip.
pub fn select_tail(clip: &VideoClip, seconds: f64) -> Result<VideoClip> {
    let keep = frames_for_seconds(seconds, clip.fps, "tail")?;
    if keep > clip.frames {
        return Err(Error::TooShort(format!(
            "clip has {} frames, the {} second tail needs {}",
            clip.frames, seconds, keep
        )));
    }
    let per = clip.height * clip.width * VideoClip::CHANNELS;
    let start = clip.frames - keep;
    Ok(VideoClip {
        frames: keep,
        height: clip.height,
        width: clip.width,
        fps: clip.fps,
        data: clip.data[start * per..].to_vec(),
    })
}

/// Splits the clip into consecutive non-overlapping windows of
/// `seconds` each, dropping any trailing remainder.
pub fn split_windows(clip: &VideoClip, seconds: f64) -> Result<Vec<VideoClip>> {
    let win = frames_for_seconds(seconds, clip.fps, "window")?;
    let count = clip.frames / win;
    if count == 0 {
        return Err(Error::NoWindow(format!(
            "clip has {} frames, one {} second window needs {}",
            clip.frames, seconds, win
        )));
    }
    let per = clip.height * clip.width * VideoClip::CHANNELS;
    Ok((0..count)
        .map(|k| VideoClip {
            frames: win,
            height: clip.height,
            width: clip.width,
            fps: clip.fps,
            data: clip.data[k * win * per..(k + 1) * win * per].to_vec(),
        })
        .collect())
}

/// Bilinear resize with half-pixel centers, plus rescale to [0, 1].
/// Returns `[T, height, width, 3]`.
pub fn prepare<T: Scalar>(clip: &VideoClip, height: usize, width: usize) -> Result<Tensor<T>> {
    if height == 0 || width == 0 {
        return Err(Error::InvalidValue("resize target must be positive".into()));
    }
    let ch = VideoClip::CHANNELS;
    let (sh, sw) = (clip.height, clip.width);
    let mut out = Vec::with_capacity(clip.frames * height * width * ch);

    if (sh, sw) == (height, width) {
        out.extend(clip.data.iter().map(|&b| T::from_f64(b as f64 / 255.0)));
        return Tensor::from_vec(&[clip.frames, height, width, ch], out);
    }

    // Source coordinates and lerp weights per output row/column.
    let axis_map = |dst: usize, src: usize| -> Vec<(usize, usize, f64)> {
        (0..dst)
            .map(|i| {
                let c = ((i as f64 + 0.5) * src as f64 / dst as f64 - 0.5)
                    .clamp(0.0, (src - 1) as f64);
                let lo = libm::floor(c) as usize;
                let hi = (lo + 1).min(src - 1);
                (lo, hi, c - lo as f64)
            })
            .collect()
    };
    let rows = axis_map(height, sh);
    let cols = axis_map(width, sw);

    for t in 0..clip.frames {
        let f = clip.frame(t);
        for &(y0, y1, ty) in &rows {
            for &(x0, x1, tx) in &cols {
                for c in 0..ch {
                    let at = |y: usize, x: usize| f[(y * sw + x) * ch + c] as f64;
                    let top = at(y0, x0) + (at(y0, x1) - at(y0, x0)) * tx;
                    let bot = at(y1, x0) + (at(y1, x1) - at(y1, x0)) * tx;
                    let v = (top + (bot - top) * ty) / 255.0;
                    out.push(T::from_f64(v));
                }
            }
        }
    }
    Tensor::from_vec(&[clip.frames, height, width, ch], out)
}

/// Zeroes every pixel outside the region of interest. Operates on
/// plain data; any gradient tape on the input is not carried over.
pub fn mask_roi<T: Scalar>(x: &Tensor<T>, roi: &RoiSpec) -> Result<Tensor<T>> {
    roi.validate()?;
    if x.rank() != 4 {
        return Err(Error::InvalidShape(format!(
            "mask_roi expects [T, H, W, C], got {:?}",
            x.shape()
        )));
    }
    let (t, h, w, ch) = (x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]);
    let mut data = x.to_vec();
    let mut inside = vec![false; h * w];
    for y in 0..h {
        for xx in 0..w {
            inside[y * w + xx] = roi_contains(roi, h, w, y, xx);
        }
    }
    for frame in 0..t {
        let base = frame * h * w * ch;
        for (p, &keep) in inside.iter().enumerate() {
            if !keep {
                for c in 0..ch {
                    data[base + p * ch + c] = T::ZERO;
                }
            }
        }
    }
    Tensor::from_vec(x.shape(), data)
}

/// Full preprocessing configuration.
#[derive(Debug, Clone, Copy)]
pub struct PipelineConfig {
    /// Decimate to this rate first, when given.
    pub target_fps: Option<u32>,
    /// Keep only the final stretch, when given.
    pub tail_seconds: Option<f64>,
    pub window_seconds: f64,
    pub height: usize,
    pub width: usize,
    pub roi: Option<RoiSpec>,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            target_fps: None,
            tail_seconds: Some(10.0),
            window_seconds: 2.0,
            height: 224,
            width: 224,
            roi: Some(RoiSpec::default()),
        }
    }
}

/// Runs the whole chain on one clip, returning its model-ready windows
/// in temporal order.
pub fn process_clip<T: Scalar>(clip: &VideoClip, cfg: &PipelineConfig) -> Result<Vec<Tensor<T>>> {
    let resampled;
    let mut stage = clip;
    if let Some(fps) = cfg.target_fps {
        resampled = resample_fps(stage, fps)?;
        stage = &resampled;
    }
    let tailed;
    if let Some(seconds) = cfg.tail_seconds {
        tailed = select_tail(stage, seconds)?;
        stage = &tailed;
    }
    let mut out = Vec::new();
    for window in split_windows(stage, cfg.window_seconds)? {
        let mut x = prepare::<T>(&window, cfg.height, cfg.width)?;
        if let Some(roi) = &cfg.roi {
            x = mask_roi(&x, roi)?;
        }
        out.push(x);
    }
    Ok(out)
}
