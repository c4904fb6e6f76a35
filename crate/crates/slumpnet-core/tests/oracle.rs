//! Optimized kernels against independent nested-loop references, over
//! randomized shapes in f32.

use slumpnet_core::layers::{conv2d, conv3d, maxpool2d, maxpool3d, ConvLstm2dLayer, Mode};
use slumpnet_core::{RngStream, Tensor};
use slumpnet_testkit as tk;

const TOL: f64 = 1e-6;

fn f64s(x: &Tensor<f32>) -> Vec<f64> {
    x.data().iter().map(|&v| v as f64).collect()
}

fn assert_close(case: &str, got: &Tensor<f32>, want: &[f64]) {
    let got = f64s(got);
    assert_eq!(got.len(), want.len(), "{case}: length mismatch");
    assert!(
        tk::within_tol(&got, want, TOL),
        "{case}: max |diff| = {:.3e}",
        tk::max_abs_diff(&got, want)
    );
}

#[test]
fn conv2d_matches_reference_on_random_shapes() {
    let mut rng = RngStream::new(0xC0117, 1);
    for case in 0..60 {
        let n = 1 + rng.next_below(3);
        let h = 3 + rng.next_below(10);
        let w = 3 + rng.next_below(10);
        let cin = 1 + rng.next_below(4);
        let cout = 1 + rng.next_below(5);
        let k = [1, 2, 3, 5][rng.next_below(4)];
        let stride = 1 + rng.next_below(2);
        let with_bias = rng.next_below(2) == 1;

        let x = Tensor::<f32>::uniform(&[n, h, w, cin], -1.0, 1.0, &mut rng).unwrap();
        let kernel = Tensor::<f32>::uniform(&[k, k, cin, cout], -1.0, 1.0, &mut rng).unwrap();
        let bias = Tensor::<f32>::uniform(&[cout], -1.0, 1.0, &mut rng).unwrap();
        let y = conv2d(&x, &kernel, with_bias.then_some(&bias), stride).unwrap();

        let bias64 = f64s(&bias);
        let (want, oh, ow) = tk::conv2d_ref(
            &f64s(&x),
            n,
            h,
            w,
            cin,
            &f64s(&kernel),
            k,
            k,
            cout,
            with_bias.then_some(&bias64[..]),
            stride,
        );
        let label = format!(
            "case {case}: [{n},{h},{w},{cin}] k{k} s{stride} cout{cout} bias={with_bias}"
        );
        assert_eq!(y.shape(), &[n, oh, ow, cout], "{label}: shape");
        assert_close(&label, &y, &want);
    }
}

#[test]
fn conv3d_matches_reference_on_random_shapes() {
    let mut rng = RngStream::new(0xC0117, 2);
    for case in 0..60 {
        let n = 1 + rng.next_below(2);
        let t = 1 + rng.next_below(5);
        let h = 3 + rng.next_below(7);
        let w = 3 + rng.next_below(7);
        let cin = 1 + rng.next_below(3);
        let cout = 1 + rng.next_below(4);
        let kt = 1 + rng.next_below(3);
        let k = [1, 2, 3][rng.next_below(3)];
        let with_bias = rng.next_below(2) == 1;

        let x = Tensor::<f32>::uniform(&[n, t, h, w, cin], -1.0, 1.0, &mut rng).unwrap();
        let kernel = Tensor::<f32>::uniform(&[kt, k, k, cin, cout], -1.0, 1.0, &mut rng).unwrap();
        let bias = Tensor::<f32>::uniform(&[cout], -1.0, 1.0, &mut rng).unwrap();
        let y = conv3d(&x, &kernel, with_bias.then_some(&bias), 1, 1).unwrap();

        let bias64 = f64s(&bias);
        let (want, ot, oh, ow) = tk::conv3d_ref(
            &f64s(&x),
            n,
            t,
            h,
            w,
            cin,
            &f64s(&kernel),
            kt,
            k,
            k,
            cout,
            with_bias.then_some(&bias64[..]),
            1,
            1,
        );
        let label = format!("case {case}: [{n},{t},{h},{w},{cin}] k({kt},{k}) cout{cout}");
        assert_eq!(y.shape(), &[n, ot, oh, ow, cout], "{label}: shape");
        assert_close(&label, &y, &want);
    }
}

#[test]
fn convlstm_matches_reference_on_random_shapes() {
    let mut rng = RngStream::new(0xC0117, 3);
    for case in 0..50 {
        let n = 1 + rng.next_below(2);
        let t = 1 + rng.next_below(3);
        let h = 3 + rng.next_below(5);
        let w = 3 + rng.next_below(5);
        let cin = 1 + rng.next_below(3);
        let c = 1 + rng.next_below(3);
        let k = 1 + rng.next_below(3);

        let lstm = ConvLstm2dLayer::<f32>::new(k, cin, c, &mut rng).unwrap();
        let x = Tensor::<f32>::uniform(&[n, t, h, w, cin], -1.0, 1.0, &mut rng).unwrap();
        let y = lstm.forward(&x, Mode::Infer).unwrap();

        let want = tk::convlstm_ref(
            &f64s(&x),
            n,
            t,
            h,
            w,
            cin,
            &f64s(&lstm.input_kernel),
            &f64s(&lstm.recurrent_kernel),
            &f64s(&lstm.bias),
            k,
            c,
        );
        let label = format!("case {case}: [{n},{t},{h},{w},{cin}] k{k} c{c}");
        assert_eq!(y.shape(), &[n, t, h, w, c], "{label}: shape");
        assert_close(&label, &y, &want);
    }
}

#[test]
fn maxpool2d_matches_reference() {
    let mut rng = RngStream::new(0xC0117, 4);
    for _ in 0..30 {
        let n = 1 + rng.next_below(3);
        let h = 2 + rng.next_below(9);
        let w = 2 + rng.next_below(9);
        let c = 1 + rng.next_below(4);
        let x = Tensor::<f32>::uniform(&[n, h, w, c], -1.0, 1.0, &mut rng).unwrap();
        let y = maxpool2d(&x).unwrap();
        let (want, oh, ow) = tk::maxpool2d_ref(&f64s(&x), n, h, w, c);
        assert_eq!(y.shape(), &[n, oh, ow, c]);
        assert_close("maxpool2d", &y, &want);
    }
}

#[test]
fn maxpool3d_matches_reference() {
    let mut rng = RngStream::new(0xC0117, 5);
    for _ in 0..30 {
        let n = 1 + rng.next_below(2);
        let t = 1 + rng.next_below(5);
        let h = 2 + rng.next_below(7);
        let w = 2 + rng.next_below(7);
        let c = 1 + rng.next_below(3);
        let x = Tensor::<f32>::uniform(&[n, t, h, w, c], -1.0, 1.0, &mut rng).unwrap();
        let y = maxpool3d(&x).unwrap();
        let (want, ot, oh, ow) = tk::maxpool3d_ref(&f64s(&x), n, t, h, w, c);
        assert_eq!(y.shape(), &[n, ot, oh, ow, c]);
        assert_close("maxpool3d", &y, &want);
    }
}

#[test]
fn matmul_matches_reference() {
    let mut rng = RngStream::new(0xC0117, 6);
    for _ in 0..30 {
        let n = 1 + rng.next_below(8);
        let k = 1 + rng.next_below(12);
        let m = 1 + rng.next_below(8);
        let a = Tensor::<f32>::uniform(&[n, k], -1.0, 1.0, &mut rng).unwrap();
        let b = Tensor::<f32>::uniform(&[k, m], -1.0, 1.0, &mut rng).unwrap();
        let y = a.matmul(&b).unwrap();
        let want = tk::matmul_ref(&f64s(&a), &f64s(&b), n, k, m);
        assert_close("matmul", &y, &want);
    }
}

#[test]
fn global_avg_pool_matches_reduction_reference() {
    let mut rng = RngStream::new(0xC0117, 7);
    for _ in 0..20 {
        let n = 1 + rng.next_below(3);
        let t = 1 + rng.next_below(4);
        let h = 1 + rng.next_below(5);
        let w = 1 + rng.next_below(5);
        let c = 1 + rng.next_below(4);
        let x = Tensor::<f32>::uniform(&[n, t, h, w, c], -1.0, 1.0, &mut rng).unwrap();
        let y = x.global_avg_pool().unwrap();
        let (sums, _) = tk::reduce_sum_ref(&f64s(&x), &[n, t, h, w, c], &[1, 2, 3]);
        let want: Vec<f64> = sums.iter().map(|s| s / (t * h * w) as f64).collect();
        assert_eq!(y.shape(), &[n, c]);
        assert_close("global_avg_pool", &y, &want);
    }
}
