//! Hand-crafted reference predictors.
//!
//! Two cheap statistics summarize a clip: surface texture (mean local
//! 3x3 grayscale variance) and apparent motion (mean absolute
//! inter-frame difference). A two-feature linear model on top of them
//! is the floor any learned model has to clear; a predict-the-mean
//! baseline is the floor below that.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pipeline::{roi_contains, RoiSpec};
use crate::synth::VideoClip;

/// Statistics are taken inside this region, slightly smaller than the
/// drum opening so the hard material-to-housing edge at the rim (large
/// local variance, carrying no consistency signal) stays out.
const STAT_ROI: RoiSpec = RoiSpec {
    center_y: 0.5,
    center_x: 0.5,
    radius: 0.44,
};

/// Returns `(texture, motion)` for a clip, both on grayscale in [0, 1]:
/// texture is the mean 3x3 local variance, motion the mean absolute
/// difference between consecutive frames (0 for a single-frame clip).
/// Both are measured inside [`STAT_ROI`]; frames too small to fit any
/// 3x3 window in it fall back to the full frame.
pub fn clip_stats(clip: &VideoClip) -> (f64, f64) {
    let (h, w) = (clip.height, clip.width);
    let px = h * w;
    let mut gray = Vec::with_capacity(clip.frames * px);
    for t in 0..clip.frames {
        let f = clip.frame(t);
        for p in 0..px {
            let sum = f[p * 3] as f64 + f[p * 3 + 1] as f64 + f[p * 3 + 2] as f64;
            gray.push(sum / (3.0 * 255.0));
        }
    }

    let mut inside = vec![false; px];
    for y in 0..h {
        for x in 0..w {
            inside[y * w + x] = roi_contains(&STAT_ROI, h, w, y, x);
        }
    }
    let mut window_ok = vec![false; px];
    let mut windows = 0usize;
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let ok = (0..3).all(|dy| (0..3).all(|dx| inside[(y + dy - 1) * w + (x + dx - 1)]));
            window_ok[y * w + x] = ok;
            windows += ok as usize;
        }
    }
    if windows == 0 {
        inside.fill(true);
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                window_ok[y * w + x] = true;
                windows += 1;
            }
        }
    }
    let inside_count = inside.iter().filter(|&&b| b).count();

    let mut texture_sum = 0.0;
    for t in 0..clip.frames {
        let g = &gray[t * px..(t + 1) * px];
        let mut frame_sum = 0.0;
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                if !window_ok[y * w + x] {
                    continue;
                }
                let mut s = 0.0;
                let mut s2 = 0.0;
                for dy in 0..3 {
                    for dx in 0..3 {
                        let v = g[(y + dy - 1) * w + (x + dx - 1)];
                        s += v;
                        s2 += v * v;
                    }
                }
                let mean = s / 9.0;
                frame_sum += s2 / 9.0 - mean * mean;
            }
        }
        texture_sum += frame_sum / windows as f64;
    }
    let texture = texture_sum / clip.frames as f64;

    let motion = if clip.frames < 2 {
        0.0
    } else {
        let mut sum = 0.0;
        for t in 0..clip.frames - 1 {
            let (a, b) = (&gray[t * px..(t + 1) * px], &gray[(t + 1) * px..(t + 2) * px]);
            let pair: f64 = (0..px)
                .filter(|&p| inside[p])
                .map(|p| (a[p] - b[p]).abs())
                .sum();
            sum += pair / inside_count as f64;
        }
        sum / (clip.frames - 1) as f64
    };

    (texture, motion)
}

/// `slump = w1 * texture + w2 * motion + b`, least-squares fitted.
#[derive(Debug, Clone, Copy)]
pub struct LinearBaseline {
    pub w1: f64,
    pub w2: f64,
    pub b: f64,
}

impl LinearBaseline {
    /// Fits by solving the 3x3 normal equations.
    pub fn fit(stats: &[(f64, f64)], targets: &[f64]) -> Result<LinearBaseline> {
        if stats.len() != targets.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} stat rows vs {} targets",
                stats.len(),
                targets.len()
            )));
        }
        if stats.len() < 3 {
            return Err(Error::DegenerateBatch(format!(
                "need at least 3 samples to fit 3 coefficients, got {}",
                stats.len()
            )));
        }
        let mut xtx = [[0.0f64; 3]; 3];
        let mut xty = [0.0f64; 3];
        for (&(s1, s2), &y) in stats.iter().zip(targets) {
            let row = [s1, s2, 1.0];
            for i in 0..3 {
                for j in 0..3 {
                    xtx[i][j] += row[i] * row[j];
                }
                xty[i] += row[i] * y;
            }
        }
        let beta = solve3(xtx, xty)?;
        Ok(LinearBaseline {
            w1: beta[0],
            w2: beta[1],
            b: beta[2],
        })
    }

    pub fn predict(&self, stats: (f64, f64)) -> f64 {
        self.w1 * stats.0 + self.w2 * stats.1 + self.b
    }

    pub fn mae(&self, stats: &[(f64, f64)], targets: &[f64]) -> Result<f64> {
        if stats.is_empty() || stats.len() != targets.len() {
            return Err(Error::Empty("mae needs matching non-empty slices".into()));
        }
        let sum: f64 = stats
            .iter()
            .zip(targets)
            .map(|(&s, &y)| (self.predict(s) - y).abs())
            .sum();
        Ok(sum / targets.len() as f64)
    }
}

/// MAE of always predicting the training-set mean.
pub fn mean_baseline_mae(train_targets: &[f64], eval_targets: &[f64]) -> Result<f64> {
    if train_targets.is_empty() || eval_targets.is_empty() {
        return Err(Error::Empty("mean baseline needs non-empty target sets".into()));
    }
    let mean = train_targets.iter().sum::<f64>() / train_targets.len() as f64;
    Ok(eval_targets.iter().map(|y| (y - mean).abs()).sum::<f64>() / eval_targets.len() as f64)
}

/// Gaussian elimination with partial pivoting on a 3x3 system.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Result<[f64; 3]> {
    for col in 0..3 {
        let mut piv = col;
        for row in col + 1..3 {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col].abs() < 1e-12 {
            return Err(Error::DegenerateBatch(
                "normal equations are singular; the features do not vary".into(),
            ));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}
