//! Property-based invariants over randomized inputs.

use proptest::prelude::*;

use slumpnet_core::layers::conv2d;
use slumpnet_core::pipeline::{
    mask_roi, resample_fps, roi_contains, select_tail, split_windows, RoiSpec,
};
use slumpnet_core::synth::{split_counts, VideoClip};
use slumpnet_core::{RngStream, Tensor};
use slumpnet_testkit as tk;

fn ramp(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64) * 0.37 - 1.0).collect()
}

fn clip_with_ramp(frames: usize, height: usize, width: usize, fps: u32) -> VideoClip {
    let n = frames * height * width * VideoClip::CHANNELS;
    VideoClip {
        frames,
        height,
        width,
        fps,
        data: (0..n).map(|i| (i % 251) as u8).collect(),
    }
}

/// A compatible broadcast pair: a base shape, per-operand dims squashed
/// to one, and per-operand leading dims dropped.
fn broadcast_pair() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    prop::collection::vec(1usize..=4, 1..=4).prop_flat_map(|base| {
        let r = base.len();
        (
            Just(base),
            prop::collection::vec(any::<bool>(), r),
            prop::collection::vec(any::<bool>(), r),
            0..r,
            0..r,
        )
            .prop_map(|(base, squash_a, squash_b, drop_a, drop_b)| {
                let shrink = |squash: &[bool], drop: usize| -> Vec<usize> {
                    base.iter()
                        .enumerate()
                        .skip(drop)
                        .map(|(i, &e)| if squash[i] { 1 } else { e })
                        .collect()
                };
                (shrink(&squash_a, drop_a), shrink(&squash_b, drop_b))
            })
    })
}

proptest! {
    #[test]
    fn broadcast_add_and_mul_match_reference((sa, sb) in broadcast_pair()) {
        let a = Tensor::<f64>::from_vec(&sa, ramp(sa.iter().product())).unwrap();
        let b = Tensor::<f64>::from_vec(&sb, ramp(sb.iter().product())).unwrap();
        let (want_add, shape) =
            tk::broadcast_apply_ref(&a.to_vec(), &sa, &b.to_vec(), &sb, |x, y| x + y).unwrap();
        let (want_mul, _) =
            tk::broadcast_apply_ref(&a.to_vec(), &sa, &b.to_vec(), &sb, |x, y| x * y).unwrap();

        let got_add = a.add(&b).unwrap();
        let got_mul = a.mul(&b).unwrap();
        prop_assert_eq!(got_add.shape(), &shape[..]);
        prop_assert_eq!(got_add.to_vec(), want_add);
        prop_assert_eq!(got_mul.to_vec(), want_mul);
    }

    #[test]
    fn reductions_match_reference(
        shape in prop::collection::vec(1usize..=4, 1..=4),
        mask in prop::collection::vec(any::<bool>(), 4),
    ) {
        let axes: Vec<usize> = (0..shape.len()).filter(|&d| mask[d]).collect();
        prop_assume!(!axes.is_empty());
        let x = Tensor::<f64>::from_vec(&shape, ramp(shape.iter().product())).unwrap();
        let (want, mut want_shape) = tk::reduce_sum_ref(&x.to_vec(), &shape, &axes);
        if want_shape.is_empty() {
            // This library represents scalars as single-element vectors.
            want_shape.push(1);
        }

        let got = x.sum_axes(&axes).unwrap();
        prop_assert_eq!(got.shape(), &want_shape[..]);
        prop_assert!(tk::within_tol(&got.to_vec(), &want, 1e-12));

        let red_n: f64 = axes.iter().map(|&a| shape[a] as f64).product();
        let want_mean: Vec<f64> = want.iter().map(|s| s / red_n).collect();
        let got_mean = x.mean_axes(&axes).unwrap();
        prop_assert!(tk::within_tol(&got_mean.to_vec(), &want_mean, 1e-12));
    }

    #[test]
    fn same_padding_output_shape_is_ceil(
        h in 1usize..=12, w in 1usize..=12, k in 1usize..=7, s in 1usize..=3,
    ) {
        let x = Tensor::<f64>::from_vec(&[1, h, w, 1], ramp(h * w)).unwrap();
        let kernel = Tensor::<f64>::from_vec(&[k, k, 1, 1], ramp(k * k)).unwrap();
        let y = conv2d(&x, &kernel, None, s).unwrap();
        prop_assert_eq!(y.shape(), &[1, h.div_ceil(s), w.div_ceil(s), 1]);
    }

    #[test]
    fn reshape_and_narrow_recompose(
        rows in 1usize..=6, cols in 1usize..=6, split in 1usize..=5,
    ) {
        prop_assume!(split < rows.max(2));
        let x = Tensor::<f64>::from_vec(&[rows, cols], ramp(rows * cols)).unwrap();
        let flat = x.reshape(&[rows * cols]).unwrap();
        let back = flat.reshape(&[rows, cols]).unwrap();
        prop_assert_eq!(back.to_vec(), x.to_vec());

        if split < rows {
            let head = x.narrow(0, 0, split).unwrap();
            let tail = x.narrow(0, split, rows - split).unwrap();
            let mut joined = head.to_vec();
            joined.extend(tail.to_vec());
            prop_assert_eq!(joined, x.to_vec());
        }
    }

    #[test]
    fn split_counts_use_largest_remainder(
        n in 0usize..=2000,
        raw in (0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0),
    ) {
        let total = raw.0 + raw.1 + raw.2;
        let ratios = (raw.0 / total, raw.1 / total, raw.2 / total);
        let (a, b, c) = split_counts(n, ratios).unwrap();
        prop_assert_eq!(a + b + c, n);
        for (count, share) in [(a, ratios.0), (b, ratios.1), (c, ratios.2)] {
            let exact = n as f64 * share;
            prop_assert!(count == exact.floor() as usize || count == exact.ceil() as usize,
                "count {} for exact share {}", count, exact);
        }
    }

    #[test]
    fn shuffle_is_a_permutation(seed in any::<u64>(), stream in any::<u64>(), n in 0usize..=200) {
        let mut rng = RngStream::new(seed, stream);
        let mut xs: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut xs);
        let mut sorted = xs.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn rng_draws_stay_in_range(seed in any::<u64>(), n in 1usize..=1000, span in 0.001f64..100.0) {
        let mut rng = RngStream::new(seed, 5);
        let lo = -3.0;
        let hi = lo + span;
        for _ in 0..50 {
            prop_assert!(rng.next_below(n) < n);
            let u = rng.uniform(lo, hi);
            prop_assert!((lo..hi).contains(&u));
            let f = rng.next_f64();
            prop_assert!((0.0..1.0).contains(&f));
        }
    }

    #[test]
    fn rng_streams_reproduce(seed in any::<u64>(), stream in any::<u64>()) {
        let a: Vec<u64> = {
            let mut r = RngStream::new(seed, stream);
            (0..32).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::new(seed, stream);
            (0..32).map(|_| r.next_u64()).collect()
        };
        prop_assert_eq!(a, b);
    }

    #[test]
    fn roi_mask_is_idempotent_and_respects_the_circle(
        t in 1usize..=2, h in 3usize..=10, w in 3usize..=10,
    ) {
        let roi = RoiSpec::default();
        let x = Tensor::<f64>::from_vec(&[t, h, w, 3], ramp(t * h * w * 3)).unwrap();
        let once = mask_roi(&x, &roi).unwrap();
        let twice = mask_roi(&once, &roi).unwrap();
        prop_assert_eq!(once.to_vec(), twice.to_vec());

        let data = once.to_vec();
        let orig = x.to_vec();
        for (flat, (&got, &raw)) in data.iter().zip(orig.iter()).enumerate() {
            let px = flat / 3;
            let xcol = px % w;
            let yrow = (px / w) % h;
            if roi_contains(&roi, h, w, yrow, xcol) {
                prop_assert_eq!(got, raw);
            } else {
                prop_assert_eq!(got, 0.0);
            }
        }
    }

    #[test]
    fn windows_tile_the_clip_prefix(
        frames in 1usize..=40, fps in 1u32..=10, win_s in 1usize..=3,
    ) {
        let clip = clip_with_ramp(frames, 2, 3, fps);
        let win = win_s * fps as usize;
        match split_windows(&clip, win_s as f64) {
            Ok(windows) => {
                prop_assert_eq!(windows.len(), frames / win);
                let mut joined = Vec::new();
                for piece in &windows {
                    prop_assert_eq!(piece.frames, win);
                    joined.extend_from_slice(&piece.data);
                }
                let covered = (frames / win) * win * 2 * 3 * 3;
                prop_assert_eq!(&joined[..], &clip.data[..covered]);
            }
            Err(_) => prop_assert!(frames / win == 0),
        }
    }

    #[test]
    fn tail_selection_keeps_the_suffix(frames in 1usize..=40, fps in 1u32..=10, s in 1usize..=5) {
        let clip = clip_with_ramp(frames, 2, 2, fps);
        let keep = s * fps as usize;
        match select_tail(&clip, s as f64) {
            Ok(tail) => {
                prop_assert_eq!(tail.frames, keep);
                let per = 2 * 2 * 3;
                prop_assert_eq!(&tail.data[..], &clip.data[(frames - keep) * per..]);
            }
            Err(_) => prop_assert!(keep > frames),
        }
    }

    #[test]
    fn resampling_downsamples_by_index_map(
        frames in 1usize..=40, src in 2u32..=12, tgt_off in 0u32..=11,
    ) {
        let tgt = 1 + tgt_off % src;
        let clip = clip_with_ramp(frames, 2, 2, src);
        let out_frames = frames * tgt as usize / src as usize;
        match resample_fps(&clip, tgt) {
            Ok(out) => {
                prop_assert_eq!(out.frames, out_frames);
                prop_assert_eq!(out.fps, tgt);
                for i in 0..out.frames {
                    let srcidx = i * src as usize / tgt as usize;
                    prop_assert_eq!(out.frame(i), clip.frame(srcidx));
                }
            }
            Err(_) => prop_assert!(out_frames == 0),
        }
    }

    #[test]
    fn from_vec_rejects_wrong_length(
        shape in prop::collection::vec(1usize..=4, 1..=3), extra in 1usize..=3,
    ) {
        let numel: usize = shape.iter().product();
        prop_assert!(Tensor::<f64>::from_vec(&shape, ramp(numel + extra)).is_err());
        prop_assert!(Tensor::<f64>::from_vec(&shape, ramp(numel)).is_ok());
    }
}
