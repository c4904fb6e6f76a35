//! Independent reference implementations for verifying the engine.
//!
//! Everything here is written as plain nested loops over `f64` slices,
//! with no shared code, no intermediate buffers beyond the output, and
//! no dependencies. Deliberately slow and obvious: these are the
//! oracles the optimized kernels are compared against, so they must be
//! checkable by eye.
//!
//! Convolutions are cross-correlations (no kernel flip) with "same"
//! padding: `out = ceil(len / stride)`, total padding
//! `max((out - 1) * stride + k - len, 0)`, split low side first.

/// Output length and low-side padding for a same-padded axis.
pub fn same_axis(len: usize, k: usize, stride: usize) -> (usize, usize) {
    let out = len.div_ceil(stride);
    let needed = (out - 1) * stride + k;
    let total = needed.saturating_sub(len);
    (out, total / 2)
}

/// 2D convolution over `[N, H, W, Cin]` with kernel `[kh, kw, Cin, Cout]`.
/// Returns the output plus its spatial extents.
#[allow(clippy::too_many_arguments)]
pub fn conv2d_ref(
    x: &[f64],
    n: usize,
    h: usize,
    w: usize,
    cin: usize,
    kernel: &[f64],
    kh: usize,
    kw: usize,
    cout: usize,
    bias: Option<&[f64]>,
    stride: usize,
) -> (Vec<f64>, usize, usize) {
    assert_eq!(x.len(), n * h * w * cin);
    assert_eq!(kernel.len(), kh * kw * cin * cout);
    let (oh, pad_top) = same_axis(h, kh, stride);
    let (ow, pad_left) = same_axis(w, kw, stride);
    let mut out = vec![0.0; n * oh * ow * cout];
    for ni in 0..n {
        for oy in 0..oh {
            for ox in 0..ow {
                for co in 0..cout {
                    let mut acc = bias.map_or(0.0, |b| b[co]);
                    for ky in 0..kh {
                        for kx in 0..kw {
                            let iy = (oy * stride + ky) as isize - pad_top as isize;
                            let ix = (ox * stride + kx) as isize - pad_left as isize;
                            if iy < 0 || iy >= h as isize || ix < 0 || ix >= w as isize {
                                continue;
                            }
                            let (iy, ix) = (iy as usize, ix as usize);
                            for ci in 0..cin {
                                acc += x[((ni * h + iy) * w + ix) * cin + ci]
                                    * kernel[((ky * kw + kx) * cin + ci) * cout + co];
                            }
                        }
                    }
                    out[((ni * oh + oy) * ow + ox) * cout + co] = acc;
                }
            }
        }
    }
    (out, oh, ow)
}

/// 3D convolution over `[N, T, H, W, Cin]` with kernel
/// `[kt, kh, kw, Cin, Cout]`. Returns the output plus its extents.
#[allow(clippy::too_many_arguments)]
pub fn conv3d_ref(
    x: &[f64],
    n: usize,
    t: usize,
    h: usize,
    w: usize,
    cin: usize,
    kernel: &[f64],
    kt: usize,
    kh: usize,
    kw: usize,
    cout: usize,
    bias: Option<&[f64]>,
    stride_t: usize,
    stride_s: usize,
) -> (Vec<f64>, usize, usize, usize) {
    assert_eq!(x.len(), n * t * h * w * cin);
    assert_eq!(kernel.len(), kt * kh * kw * cin * cout);
    let (ot, pad_front) = same_axis(t, kt, stride_t);
    let (oh, pad_top) = same_axis(h, kh, stride_s);
    let (ow, pad_left) = same_axis(w, kw, stride_s);
    let mut out = vec![0.0; n * ot * oh * ow * cout];
    for ni in 0..n {
        for oz in 0..ot {
            for oy in 0..oh {
                for ox in 0..ow {
                    for co in 0..cout {
                        let mut acc = bias.map_or(0.0, |b| b[co]);
                        for kz in 0..kt {
                            let iz = (oz * stride_t + kz) as isize - pad_front as isize;
                            if iz < 0 || iz >= t as isize {
                                continue;
                            }
                            for ky in 0..kh {
                                for kx in 0..kw {
                                    let iy = (oy * stride_s + ky) as isize - pad_top as isize;
                                    let ix = (ox * stride_s + kx) as isize - pad_left as isize;
                                    if iy < 0 || iy >= h as isize || ix < 0 || ix >= w as isize {
                                        continue;
                                    }
                                    let (iz, iy, ix) = (iz as usize, iy as usize, ix as usize);
                                    for ci in 0..cin {
                                        acc += x[(((ni * t + iz) * h + iy) * w + ix) * cin + ci]
                                            * kernel[(((kz * kh + ky) * kw + kx) * cin + ci)
                                                * cout
                                                + co];
                                    }
                                }
                            }
                        }
                        out[(((ni * ot + oz) * oh + oy) * ow + ox) * cout + co] = acc;
                    }
                }
            }
        }
    }
    (out, ot, oh, ow)
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Convolutional LSTM over `[N, T, H, W, Cin]` returning every hidden
/// state `[N, T, H, W, C]`. Gates are packed `i, f, g, o` along the
/// channel axis of both kernels; states start at zero; spatial
/// convolutions are stride-1 same-padded.
#[allow(clippy::too_many_arguments)]
pub fn convlstm_ref(
    x: &[f64],
    n: usize,
    t: usize,
    h: usize,
    w: usize,
    cin: usize,
    input_kernel: &[f64],
    recurrent_kernel: &[f64],
    bias: &[f64],
    k: usize,
    c: usize,
) -> Vec<f64> {
    assert_eq!(x.len(), n * t * h * w * cin);
    assert_eq!(input_kernel.len(), k * k * cin * 4 * c);
    assert_eq!(recurrent_kernel.len(), k * k * c * 4 * c);
    assert_eq!(bias.len(), 4 * c);

    let px = n * h * w;
    let mut hidden = vec![0.0; px * c];
    let mut cell = vec![0.0; px * c];
    let mut out = Vec::with_capacity(t * px * c);

    for step in 0..t {
        // Gather frame `step` of every batch element.
        let mut xt = vec![0.0; px * cin];
        for ni in 0..n {
            let src = ((ni * t + step) * h * w) * cin;
            let dst = (ni * h * w) * cin;
            xt[dst..dst + h * w * cin].copy_from_slice(&x[src..src + h * w * cin]);
        }
        let (z, _, _) = conv2d_ref(&xt, n, h, w, cin, input_kernel, k, k, 4 * c, Some(bias), 1);
        let (r, _, _) = conv2d_ref(&hidden, n, h, w, c, recurrent_kernel, k, k, 4 * c, None, 1);
        for p in 0..px {
            for ch in 0..c {
                let g_at = |q: usize| z[p * 4 * c + q * c + ch] + r[p * 4 * c + q * c + ch];
                let i = sigmoid(g_at(0));
                let f = sigmoid(g_at(1));
                let g = g_at(2).tanh();
                let o = sigmoid(g_at(3));
                let cc = f * cell[p * c + ch] + i * g;
                cell[p * c + ch] = cc;
                hidden[p * c + ch] = o * cc.tanh();
            }
        }
        out.extend_from_slice(&hidden);
    }

    // Reorder from per-step [N, H, W, C] blocks to [N, T, H, W, C].
    let mut reordered = vec![0.0; n * t * h * w * c];
    for step in 0..t {
        for ni in 0..n {
            let src = (step * n + ni) * h * w * c;
            let dst = (ni * t + step) * h * w * c;
            reordered[dst..dst + h * w * c].copy_from_slice(&out[src..src + h * w * c]);
        }
    }
    reordered
}

/// 2x2 stride-2 max pooling over `[N, H, W, C]`, floor semantics.
pub fn maxpool2d_ref(x: &[f64], n: usize, h: usize, w: usize, c: usize) -> (Vec<f64>, usize, usize) {
    let (oh, ow) = (h / 2, w / 2);
    let mut out = vec![0.0; n * oh * ow * c];
    for ni in 0..n {
        for oy in 0..oh {
            for ox in 0..ow {
                for ci in 0..c {
                    let mut best = f64::NEG_INFINITY;
                    for dy in 0..2 {
                        for dx in 0..2 {
                            let v = x[((ni * h + oy * 2 + dy) * w + ox * 2 + dx) * c + ci];
                            if v > best {
                                best = v;
                            }
                        }
                    }
                    out[((ni * oh + oy) * ow + ox) * c + ci] = best;
                }
            }
        }
    }
    (out, oh, ow)
}

/// 2x2x2 stride-2 max pooling over `[N, T, H, W, C]`. When `t == 1`
/// the temporal window collapses to 1 and pooling is spatial only.
pub fn maxpool3d_ref(
    x: &[f64],
    n: usize,
    t: usize,
    h: usize,
    w: usize,
    c: usize,
) -> (Vec<f64>, usize, usize, usize) {
    let wt = t.min(2);
    let ot = if t == 1 { 1 } else { t / 2 };
    let (oh, ow) = (h / 2, w / 2);
    let mut out = vec![0.0; n * ot * oh * ow * c];
    for ni in 0..n {
        for oz in 0..ot {
            for oy in 0..oh {
                for ox in 0..ow {
                    for ci in 0..c {
                        let mut best = f64::NEG_INFINITY;
                        for dz in 0..wt {
                            for dy in 0..2 {
                                for dx in 0..2 {
                                    let v = x[(((ni * t + oz * wt + dz) * h + oy * 2 + dy) * w
                                        + ox * 2
                                        + dx)
                                        * c
                                        + ci];
                                    if v > best {
                                        best = v;
                                    }
                                }
                            }
                        }
                        out[(((ni * ot + oz) * oh + oy) * ow + ox) * c + ci] = best;
                    }
                }
            }
        }
    }
    (out, ot, oh, ow)
}

/// Plain three-loop matrix product: `[n, k] x [k, m]`.
pub fn matmul_ref(a: &[f64], b: &[f64], n: usize, k: usize, m: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * k);
    assert_eq!(b.len(), k * m);
    let mut out = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            let mut acc = 0.0;
            for p in 0..k {
                acc += a[i * k + p] * b[p * m + j];
            }
            out[i * m + j] = acc;
        }
    }
    out
}

/// Shape of a trailing-aligned broadcast, or `None` when incompatible.
pub fn broadcast_shape_ref(a: &[usize], b: &[usize]) -> Option<Vec<usize>> {
    let rank = a.len().max(b.len());
    let mut out = vec![0; rank];
    for i in 0..rank {
        let da = if i < rank - a.len() { 1 } else { a[i - (rank - a.len())] };
        let db = if i < rank - b.len() { 1 } else { b[i - (rank - b.len())] };
        if da != db && da != 1 && db != 1 {
            return None;
        }
        out[i] = da.max(db);
    }
    Some(out)
}

/// Elementwise binary op with trailing broadcast, by walking every
/// output coordinate and mapping it into each operand.
pub fn broadcast_apply_ref(
    a: &[f64],
    a_shape: &[usize],
    b: &[f64],
    b_shape: &[usize],
    op: impl Fn(f64, f64) -> f64,
) -> Option<(Vec<f64>, Vec<usize>)> {
    let shape = broadcast_shape_ref(a_shape, b_shape)?;
    let numel: usize = shape.iter().product();
    let index_in = |flat: usize, operand: &[usize]| -> usize {
        // Decompose `flat` by the output shape, right to left, and fold
        // the coordinates that exist in the operand (mod 1 for
        // broadcast dimensions).
        let mut rem = flat;
        let mut idx = 0;
        let mut stride = 1;
        for d in (0..shape.len()).rev() {
            let coord = rem % shape[d];
            rem /= shape[d];
            let off = shape.len() - operand.len();
            if d >= off {
                let extent = operand[d - off];
                let c = if extent == 1 { 0 } else { coord };
                idx += c * stride;
                stride *= extent;
            }
        }
        idx
    };
    let mut out = Vec::with_capacity(numel);
    for flat in 0..numel {
        out.push(op(a[index_in(flat, a_shape)], b[index_in(flat, b_shape)]));
    }
    Some((out, shape))
}

/// Sum over `axes` of a row-major tensor, keeping the other axes in
/// order. An empty remaining shape yields a single element.
pub fn reduce_sum_ref(x: &[f64], shape: &[usize], axes: &[usize]) -> (Vec<f64>, Vec<usize>) {
    let out_shape: Vec<usize> = shape
        .iter()
        .enumerate()
        .filter(|(i, _)| !axes.contains(i))
        .map(|(_, &e)| e)
        .collect();
    let out_numel = out_shape.iter().product::<usize>().max(1);
    let mut out = vec![0.0; out_numel];
    for (flat, &v) in x.iter().enumerate() {
        let mut rem = flat;
        let mut coords = vec![0; shape.len()];
        for d in (0..shape.len()).rev() {
            coords[d] = rem % shape[d];
            rem /= shape[d];
        }
        let mut idx = 0;
        for d in 0..shape.len() {
            if !axes.contains(&d) {
                idx = idx * shape[d] + coords[d];
            }
        }
        out[idx] += v;
    }
    (out, out_shape)
}

/// Largest absolute elementwise difference.
pub fn max_abs_diff(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len(), "length mismatch");
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs())
        .fold(0.0, f64::max)
}

/// True when every element agrees within `tol * max(1, max|want|)`.
pub fn within_tol(got: &[f64], want: &[f64], tol: f64) -> bool {
    let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    max_abs_diff(got, want) <= tol * scale
}
