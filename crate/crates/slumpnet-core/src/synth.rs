//! Synthetic mixer-drum footage with a controllable consistency label.
//!
//! Each clip views a rotating drum end-on. The visible material is a
//! granular value-noise texture in polar coordinates, overlaid with
//! paddle shading fixed to the drum and a few wet sheen streaks riding
//! on the material. The slump label drives the look monotonically:
//!
//! * texture: stiff mixes (low slump) are dominated by a fine-grained
//!   lattice, fluid mixes by a smooth coarse one;
//! * motion: the material's angular velocity falls as slump rises,
//!   while the paddles turn at the constant drum rate;
//! * sheen: the number of specular streaks grows with slump.
//!
//! Everything is a pure function of the clip seed and parameters, so a
//! clip can be regenerated anywhere from its manifest row. Frames are
//! rendered independently, which keeps the bytes identical whether they
//! are rendered sequentially or in parallel.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::{streams, RngStream};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

use core::f32::consts::TAU;

/// Slump values are mapped onto renderer controls across this range;
/// labels outside it clamp to the endpoints.
pub const SLUMP_RANGE_CM: (f64, f64) = (40.0, 190.0);

/// Manifest split ratios that reproduce the published 185/35/35 split
/// of a 255-clip corpus.
pub const DEFAULT_SPLIT_RATIOS: (f64, f64, f64) = (37.0 / 51.0, 7.0 / 51.0, 7.0 / 51.0);

const FINE_RINGS: usize = 13;
const FINE_ANGLES: usize = 48;
const COARSE_RINGS: usize = 5;
const COARSE_ANGLES: usize = 12;
const SPEC_BUCKETS: usize = 24;
const BLADE_COUNT: f32 = 3.0;
const DRUM_OMEGA: f32 = 1.9;
const DRUM_RADIUS_FRAC: f32 = 0.48;
const BASE_LEVEL: f32 = 70.0;
const NOISE_GAIN: f32 = 60.0;
const BLADE_GAIN: f32 = 18.0;
const SPEC_GAIN: f32 = 35.0;
const BG_LEVEL: u8 = 12;
const TINT: [f32; 3] = [1.0, 0.98, 0.95];

#[derive(Debug, Clone, Copy)]
pub struct SynthParams {
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub fps: u32,
    pub slump_cm: f64,
    pub seed: u64,
}

/// Raw rendered footage: `[T, H, W, 3]` interleaved RGB bytes.
#[derive(Debug, Clone)]
pub struct VideoClip {
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub fps: u32,
    pub data: Vec<u8>,
}

impl VideoClip {
    pub const CHANNELS: usize = 3;

    pub fn frame(&self, t: usize) -> &[u8] {
        let per = self.height * self.width * Self::CHANNELS;
        &self.data[t * per..(t + 1) * per]
    }

    /// Copies the raw byte values (0..=255, not rescaled) into a
    /// `[T, H, W, 3]` tensor.
    pub fn to_tensor<T: Scalar>(&self) -> Result<Tensor<T>> {
        let data = self.data.iter().map(|&b| T::from_usize(b as usize)).collect();
        Tensor::from_vec(
            &[self.frames, self.height, self.width, Self::CHANNELS],
            data,
        )
    }
}

/// Value noise on a polar lattice, bilinearly interpolated with
/// angular wrap-around and smoothstep weights.
struct PolarNoise {
    rings: usize,
    angles: usize,
    values: Vec<f32>,
}

fn smooth(t: f32) -> f32 {
    t * t * (3.0 - 2.0 * t)
}

impl PolarNoise {
    fn generate(rings: usize, angles: usize, rng: &mut RngStream) -> PolarNoise {
        let values = (0..rings * angles).map(|_| rng.next_f64() as f32).collect();
        PolarNoise {
            rings,
            angles,
            values,
        }
    }

    /// Samples at radius `r` (0..=1) and angle `a` (radians, any value).
    fn sample(&self, r: f32, a: f32) -> f32 {
        let fr = r.clamp(0.0, 1.0) * (self.rings - 1) as f32;
        let i0 = libm::floorf(fr) as usize;
        let i1 = (i0 + 1).min(self.rings - 1);
        let ti = smooth(fr - i0 as f32);

        let na = self.angles as f32;
        let mut fa = a / TAU * na;
        fa -= libm::floorf(fa / na) * na;
        let j0 = (libm::floorf(fa) as usize) % self.angles;
        let j1 = (j0 + 1) % self.angles;
        let tj = smooth(fa - libm::floorf(fa));

        let at = |i: usize, j: usize| self.values[i * self.angles + j];
        let lo = at(i0, j0) + (at(i0, j1) - at(i0, j0)) * tj;
        let hi = at(i1, j0) + (at(i1, j1) - at(i1, j0)) * tj;
        lo + (hi - lo) * ti
    }
}

struct RenderCtx {
    fps: f32,
    /// Per-pixel normalized radius and angle; radius > 1 is outside the drum.
    polar: Vec<(f32, f32)>,
    fine: PolarNoise,
    coarse: PolarNoise,
    bucket_prob: [f32; SPEC_BUCKETS],
    bucket_strength: [f32; SPEC_BUCKETS],
    /// Coarse-texture blend weight; the fine share is its complement.
    coarse_weight: f32,
    material_omega: f32,
    spec_density: f32,
}

fn render_frame(ctx: &RenderCtx, t: usize, out: &mut [u8]) {
    let s = t as f32 / ctx.fps;
    let theta_m = ctx.material_omega * s;
    let theta_d = DRUM_OMEGA * s;
    let bucket_width = TAU / SPEC_BUCKETS as f32;

    for (p, px) in out.chunks_exact_mut(VideoClip::CHANNELS).enumerate() {
        let (r, a) = ctx.polar[p];
        if r > 1.0 {
            px.fill(BG_LEVEL);
            continue;
        }
        let am = a + theta_m;
        let n = ctx.coarse_weight * ctx.coarse.sample(r, am)
            + (1.0 - ctx.coarse_weight) * ctx.fine.sample(r, am);
        let bump = (4.0 * r * (1.0 - r)).clamp(0.0, 1.0);
        let blade = BLADE_GAIN * libm::cosf(BLADE_COUNT * (a + theta_d)) * bump;

        let mut fam = am / TAU;
        fam -= libm::floorf(fam);
        let k = ((fam * SPEC_BUCKETS as f32) as usize).min(SPEC_BUCKETS - 1);
        let spec = if ctx.bucket_prob[k] < ctx.spec_density {
            let center = (k as f32 + 0.5) * bucket_width;
            let delta = (fam * TAU - center) / (bucket_width * 0.5);
            SPEC_GAIN * ctx.bucket_strength[k] * (1.0 - delta.abs()).max(0.0) * bump
        } else {
            0.0
        };

        let lum = BASE_LEVEL + NOISE_GAIN * n + blade + spec;
        for (c, slot) in px.iter_mut().enumerate() {
            *slot = libm::roundf((lum * TINT[c]).clamp(0.0, 255.0)) as u8;
        }
    }
}

fn validate_params(p: &SynthParams) -> Result<()> {
    if p.frames == 0 {
        return Err(Error::InvalidValue("frames must be positive".into()));
    }
    if p.height < 16 || p.width < 16 {
        return Err(Error::InvalidValue(format!(
            "frame size {}x{} is below the 16x16 minimum",
            p.height, p.width
        )));
    }
    if p.fps == 0 {
        return Err(Error::InvalidValue("fps must be positive".into()));
    }
    if !p.slump_cm.is_finite() || !(0.0..=1000.0).contains(&p.slump_cm) {
        return Err(Error::InvalidValue(format!(
            "slump {} cm is outside 0..=1000",
            p.slump_cm
        )));
    }
    Ok(())
}

/// Renders one clip deterministically from its parameters.
pub fn generate_clip(p: &SynthParams) -> Result<VideoClip> {
    validate_params(p)?;
    let mut rng = RngStream::new(p.seed, 0);
    let fine = PolarNoise::generate(FINE_RINGS, FINE_ANGLES, &mut rng);
    let coarse = PolarNoise::generate(COARSE_RINGS, COARSE_ANGLES, &mut rng);
    let mut bucket_prob = [0f32; SPEC_BUCKETS];
    for slot in bucket_prob.iter_mut() {
        *slot = rng.next_f64() as f32;
    }
    let mut bucket_strength = [0f32; SPEC_BUCKETS];
    for slot in bucket_strength.iter_mut() {
        *slot = rng.uniform(0.5, 1.0) as f32;
    }

    let (lo, hi) = SLUMP_RANGE_CM;
    let u = (((p.slump_cm - lo) / (hi - lo)).clamp(0.0, 1.0)) as f32;

    let (h, w) = (p.height, p.width);
    let radius = DRUM_RADIUS_FRAC * h.min(w) as f32;
    let (cy, cx) = ((h as f32 - 1.0) / 2.0, (w as f32 - 1.0) / 2.0);
    let mut polar = Vec::with_capacity(h * w);
    for y in 0..h {
        for x in 0..w {
            let (dy, dx) = (y as f32 - cy, x as f32 - cx);
            let r = libm::sqrtf(dy * dy + dx * dx) / radius;
            let a = libm::atan2f(dy, dx);
            polar.push((r, a));
        }
    }

    let ctx = RenderCtx {
        fps: p.fps as f32,
        polar,
        fine,
        coarse,
        bucket_prob,
        bucket_strength,
        coarse_weight: 0.15 + 0.7 * u,
        material_omega: 1.6 - 1.2 * u,
        spec_density: 0.04 + 0.18 * u,
    };

    let frame_px = h * w * VideoClip::CHANNELS;
    let mut data = vec![0u8; p.frames * frame_px];
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        data.par_chunks_exact_mut(frame_px)
            .enumerate()
            .for_each(|(t, out)| render_frame(&ctx, t, out));
    }
    #[cfg(not(feature = "parallel"))]
    for (t, out) in data.chunks_exact_mut(frame_px).enumerate() {
        render_frame(&ctx, t, out);
    }

    Ok(VideoClip {
        frames: p.frames,
        height: h,
        width: w,
        fps: p.fps,
        data,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Result<Split> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidValue(format!(
                "unknown split '{other}', expected train, val or test"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DatasetSpec {
    pub clips: usize,
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub fps: u32,
    pub slump_range: (f64, f64),
    /// Train/val/test fractions; must sum to 1.
    pub ratios: (f64, f64, f64),
    pub seed: u64,
}

/// One manifest row. The clip itself is recoverable from `clip_seed`
/// plus the dataset-level frame geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetRecord {
    pub index: usize,
    pub slump_cm: f64,
    pub split: Split,
    pub clip_seed: u64,
}

/// Apportions `n` clips to train/val/test by the largest-remainder
/// rule, so each count differs from its exact quota by less than 1.
pub fn split_counts(n: usize, ratios: (f64, f64, f64)) -> Result<(usize, usize, usize)> {
    let r = [ratios.0, ratios.1, ratios.2];
    if r.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidRatios(format!(
            "ratios must be non-negative, got {r:?}"
        )));
    }
    let sum: f64 = r.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidRatios(format!(
            "ratios must sum to 1, got {sum}"
        )));
    }
    let mut base = [0usize; 3];
    let mut rem = [0f64; 3];
    for i in 0..3 {
        let quota = n as f64 * r[i];
        base[i] = libm::floor(quota) as usize;
        rem[i] = quota - base[i] as f64;
    }
    let mut leftover = n - (base[0] + base[1] + base[2]);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| rem[b].partial_cmp(&rem[a]).unwrap().then(a.cmp(&b)));
    for &i in &order {
        if leftover == 0 {
            break;
        }
        base[i] += 1;
        leftover -= 1;
    }
    Ok((base[0], base[1], base[2]))
}

/// Draws labels, assigns splits and derives per-clip seeds. Labels,
/// split assignment and clip seeds come from independent streams of the
/// master seed, so none perturbs the others.
pub fn generate_dataset(spec: &DatasetSpec) -> Result<Vec<DatasetRecord>> {
    if spec.clips == 0 {
        return Err(Error::Empty("dataset of zero clips".into()));
    }
    let (lo, hi) = spec.slump_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= 0.0 && hi <= 1000.0) {
        return Err(Error::InvalidValue(format!(
            "slump range {lo}..{hi} is not an increasing range within 0..=1000"
        )));
    }
    let (n_train, n_val, _) = split_counts(spec.clips, spec.ratios)?;

    let mut slump_rng = RngStream::new(spec.seed, streams::SLUMP);
    let slumps: Vec<f64> = (0..spec.clips).map(|_| slump_rng.uniform(lo, hi)).collect();

    let mut split_rng = RngStream::new(spec.seed, streams::SPLIT);
    let mut perm: Vec<usize> = (0..spec.clips).collect();
    split_rng.shuffle(&mut perm);
    let mut splits = vec![Split::Test; spec.clips];
    for (k, &idx) in perm.iter().enumerate() {
        splits[idx] = if k < n_train {
            Split::Train
        } else if k < n_train + n_val {
            Split::Val
        } else {
            Split::Test
        };
    }

    Ok((0..spec.clips)
        .map(|i| DatasetRecord {
            index: i,
            slump_cm: slumps[i],
            split: splits[i],
            clip_seed: RngStream::new(spec.seed, streams::clip(i)).next_u64(),
        })
        .collect())
}

/// Render parameters for one manifest row.
pub fn clip_params(spec: &DatasetSpec, rec: &DatasetRecord) -> SynthParams {
    SynthParams {
        frames: spec.frames,
        height: spec.height,
        width: spec.width,
        fps: spec.fps,
        slump_cm: rec.slump_cm,
        seed: rec.clip_seed,
    }
}
