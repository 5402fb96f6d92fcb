//! Plain square-raster convolution and pooling, the rectangular counterparts
//! of the hex engine ops.
//!
//! Convolution uses odd square kernels with zero same-padding: the output
//! keeps the input resolution at stride 1, and subsamples output centers at
//! `(stride*y, stride*x)` otherwise. Pooling is the usual valid-window kind:
//! windows lie fully inside the input, `out = (dim - k) / stride + 1`.
//!
//! Per-cell accumulation order is fixed (bias, then `(ic, ky, kx)` ascending)
//! so results are bit-reproducible.

use crate::act::SquareTensor;
use crate::NnError;

pub struct SquareConvGrads {
    pub grad_x: SquareTensor,
    pub grad_w: Vec<f64>,
    pub grad_b: Vec<f64>,
}

fn check_conv_args(
    x: &SquareTensor,
    weights: &[f64],
    bias: &[f64],
    k: usize,
    stride: usize,
) -> Result<usize, NnError> {
    if k % 2 == 0 || k == 0 {
        return Err(NnError::EvenSquareKernel { k });
    }
    if stride == 0 {
        return Err(NnError::ZeroStride);
    }
    let oc = bias.len();
    let expected = oc * x.channels() * k * k;
    if oc == 0 || weights.len() != expected {
        return Err(NnError::ValueCount {
            expected,
            got: weights.len(),
        });
    }
    Ok(oc)
}

/// Zero-pads one input plane by `h` on every side.
fn fill_padded(plane: &[f64], rows: usize, cols: usize, h: usize, padded: &mut [f64]) {
    let pcols = cols + 2 * h;
    padded.fill(0.0);
    for r in 0..rows {
        let dst = (r + h) * pcols + h;
        padded[dst..dst + cols].copy_from_slice(&plane[r * cols..(r + 1) * cols]);
    }
}

/// Correlation with an odd `k x k` kernel, zero same-padding, output centers
/// at `(stride*y, stride*x)`. Weights are laid out `[oc][ic][ky][kx]`.
pub fn conv2d(
    x: &SquareTensor,
    weights: &[f64],
    bias: &[f64],
    k: usize,
    stride: usize,
) -> Result<SquareTensor, NnError> {
    let oc = check_conv_args(x, weights, bias, k, stride)?;
    let (rows, cols, ci) = (x.rows(), x.cols(), x.channels());
    let h = (k - 1) / 2;
    let (prows, pcols) = (rows + 2 * h, cols + 2 * h);
    let out_rows = (rows - 1) / stride + 1;
    let out_cols = (cols - 1) / stride + 1;
    let mut out = SquareTensor::zeros(x.batch(), oc, out_rows, out_cols);
    let mut padded = vec![0.0; ci * prows * pcols];

    for b in 0..x.batch() {
        for ic in 0..ci {
            fill_padded(
                x.plane(b, ic),
                rows,
                cols,
                h,
                &mut padded[ic * prows * pcols..(ic + 1) * prows * pcols],
            );
        }
        for o in 0..oc {
            let plane = out.plane_mut(b, o);
            plane.fill(bias[o]);
            for ic in 0..ci {
                let pad = &padded[ic * prows * pcols..(ic + 1) * prows * pcols];
                let wbase = (o * ci + ic) * k * k;
                for ky in 0..k {
                    for kx in 0..k {
                        let w = weights[wbase + ky * k + kx];
                        if stride == 1 {
                            for y in 0..out_rows {
                                let src = (y + ky) * pcols + kx;
                                let dst = y * out_cols;
                                for xi in 0..out_cols {
                                    plane[dst + xi] += w * pad[src + xi];
                                }
                            }
                        } else {
                            for y in 0..out_rows {
                                let src = (stride * y + ky) * pcols + kx;
                                let dst = y * out_cols;
                                for xi in 0..out_cols {
                                    plane[dst + xi] += w * pad[src + stride * xi];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Analytic gradients of [`conv2d`] with respect to input, weights and bias.
pub fn conv2d_backward(
    x: &SquareTensor,
    weights: &[f64],
    bias: &[f64],
    k: usize,
    stride: usize,
    grad_out: &SquareTensor,
) -> Result<SquareConvGrads, NnError> {
    let oc = check_conv_args(x, weights, bias, k, stride)?;
    let (rows, cols, ci) = (x.rows(), x.cols(), x.channels());
    let h = (k - 1) / 2;
    let (prows, pcols) = (rows + 2 * h, cols + 2 * h);
    let out_rows = (rows - 1) / stride + 1;
    let out_cols = (cols - 1) / stride + 1;
    if grad_out.batch() != x.batch()
        || grad_out.channels() != oc
        || grad_out.rows() != out_rows
        || grad_out.cols() != out_cols
    {
        return Err(NnError::ShapeMismatch(format!(
            "grad_out is {}x{}x{}x{}, conv output is {}x{}x{}x{}",
            grad_out.batch(),
            grad_out.channels(),
            grad_out.rows(),
            grad_out.cols(),
            x.batch(),
            oc,
            out_rows,
            out_cols
        )));
    }

    let mut grad_x = SquareTensor::zeros(x.batch(), ci, rows, cols);
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = vec![0.0; oc];
    let mut padded = vec![0.0; ci * prows * pcols];
    let mut padded_g = vec![0.0; prows * pcols];

    for b in 0..x.batch() {
        for ic in 0..ci {
            fill_padded(
                x.plane(b, ic),
                rows,
                cols,
                h,
                &mut padded[ic * prows * pcols..(ic + 1) * prows * pcols],
            );
        }
        for o in 0..oc {
            let go = grad_out.plane(b, o);
            grad_b[o] += go.iter().sum::<f64>();
            for ic in 0..ci {
                let pad = &padded[ic * prows * pcols..(ic + 1) * prows * pcols];
                let wbase = (o * ci + ic) * k * k;
                padded_g.fill(0.0);
                for ky in 0..k {
                    for kx in 0..k {
                        let w = weights[wbase + ky * k + kx];
                        let mut acc = 0.0;
                        for y in 0..out_rows {
                            let src = (stride * y + ky) * pcols + kx;
                            let dst = y * out_cols;
                            for xi in 0..out_cols {
                                let g = go[dst + xi];
                                acc += g * pad[src + stride * xi];
                                padded_g[src + stride * xi] += w * g;
                            }
                        }
                        grad_w[wbase + ky * k + kx] += acc;
                    }
                }
                let gx = grad_x.plane_mut(b, ic);
                for r in 0..rows {
                    let src = (r + h) * pcols + h;
                    for c in 0..cols {
                        gx[r * cols + c] += padded_g[src + c];
                    }
                }
            }
        }
    }
    Ok(SquareConvGrads {
        grad_x,
        grad_w,
        grad_b,
    })
}

fn check_pool_args(x: &SquareTensor, k: usize, stride: usize) -> Result<(usize, usize), NnError> {
    if stride == 0 {
        return Err(NnError::ZeroStride);
    }
    if k == 0 || x.rows() < k || x.cols() < k {
        return Err(NnError::ShapeMismatch(format!(
            "pool window {k}x{k} does not fit a {}x{} input",
            x.rows(),
            x.cols()
        )));
    }
    Ok(((x.rows() - k) / stride + 1, (x.cols() - k) / stride + 1))
}

/// Valid max pooling with a `k x k` window.
pub fn max_pool(x: &SquareTensor, k: usize, stride: usize) -> Result<SquareTensor, NnError> {
    let (out_rows, out_cols) = check_pool_args(x, k, stride)?;
    let cols = x.cols();
    let mut out = SquareTensor::zeros(x.batch(), x.channels(), out_rows, out_cols);
    for b in 0..x.batch() {
        for c in 0..x.channels() {
            let plane = x.plane(b, c);
            let dst = out.plane_mut(b, c);
            for y in 0..out_rows {
                for xi in 0..out_cols {
                    let mut m = f64::NEG_INFINITY;
                    for ky in 0..k {
                        let row = (stride * y + ky) * cols + stride * xi;
                        for kx in 0..k {
                            m = m.max(plane[row + kx]);
                        }
                    }
                    dst[y * out_cols + xi] = m;
                }
            }
        }
    }
    Ok(out)
}

/// Gradient of [`max_pool`]: each window routes its incoming gradient to the
/// first maximal cell in row-major window order.
pub fn max_pool_backward(
    x: &SquareTensor,
    k: usize,
    stride: usize,
    grad_out: &SquareTensor,
) -> Result<SquareTensor, NnError> {
    let (out_rows, out_cols) = check_pool_args(x, k, stride)?;
    if grad_out.batch() != x.batch()
        || grad_out.channels() != x.channels()
        || grad_out.rows() != out_rows
        || grad_out.cols() != out_cols
    {
        return Err(NnError::ShapeMismatch(format!(
            "grad_out is {}x{}x{}x{}, pool output is {}x{}x{}x{}",
            grad_out.batch(),
            grad_out.channels(),
            grad_out.rows(),
            grad_out.cols(),
            x.batch(),
            x.channels(),
            out_rows,
            out_cols
        )));
    }
    let cols = x.cols();
    let mut grad_x = SquareTensor::zeros(x.batch(), x.channels(), x.rows(), x.cols());
    for b in 0..x.batch() {
        for c in 0..x.channels() {
            let plane = x.plane(b, c);
            let go = grad_out.plane(b, c);
            let gx = grad_x.plane_mut(b, c);
            for y in 0..out_rows {
                for xi in 0..out_cols {
                    let g = go[y * out_cols + xi];
                    if g == 0.0 {
                        continue;
                    }
                    let mut best = f64::NEG_INFINITY;
                    let mut best_at = 0;
                    for ky in 0..k {
                        let row = (stride * y + ky) * cols + stride * xi;
                        for kx in 0..k {
                            if plane[row + kx] > best {
                                best = plane[row + kx];
                                best_at = row + kx;
                            }
                        }
                    }
                    gx[best_at] += g;
                }
            }
        }
    }
    Ok(grad_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(
        rng: &mut ChaCha8Rng,
        batch: usize,
        ch: usize,
        rows: usize,
        cols: usize,
    ) -> SquareTensor {
        let values = (0..batch * ch * rows * cols)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        SquareTensor::from_values(batch, ch, rows, cols, values).unwrap()
    }

    /// Direct definition: explicit sum with bounds checks, zero outside.
    fn naive_conv(
        x: &SquareTensor,
        weights: &[f64],
        bias: &[f64],
        k: usize,
        stride: usize,
    ) -> SquareTensor {
        let h = (k as i64 - 1) / 2;
        let oc = bias.len();
        let ci = x.channels();
        let out_rows = (x.rows() - 1) / stride + 1;
        let out_cols = (x.cols() - 1) / stride + 1;
        let mut out = SquareTensor::zeros(x.batch(), oc, out_rows, out_cols);
        for b in 0..x.batch() {
            for o in 0..oc {
                for y in 0..out_rows {
                    for xi in 0..out_cols {
                        let mut acc = bias[o];
                        for ic in 0..ci {
                            for ky in 0..k {
                                for kx in 0..k {
                                    let r = (stride * y + ky) as i64 - h;
                                    let c = (stride * xi + kx) as i64 - h;
                                    if r < 0
                                        || c < 0
                                        || r >= x.rows() as i64
                                        || c >= x.cols() as i64
                                    {
                                        continue;
                                    }
                                    acc += weights[((o * ci + ic) * k + ky) * k + kx]
                                        * x.get(b, ic, r as usize, c as usize);
                                }
                            }
                        }
                        out.set(b, o, y, xi, acc);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_conv_on_random_configs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(batch, ci, co, rows, cols, k, stride) in &[
            (1usize, 1usize, 1usize, 5usize, 5usize, 3usize, 1usize),
            (2, 3, 2, 6, 7, 3, 1),
            (1, 2, 3, 8, 5, 5, 1),
            (2, 1, 2, 7, 6, 3, 2),
            (1, 2, 1, 5, 9, 1, 1),
            (1, 1, 1, 1, 1, 3, 1),
        ] {
            let x = random_tensor(&mut rng, batch, ci, rows, cols);
            let weights: Vec<f64> = (0..co * ci * k * k)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let bias: Vec<f64> = (0..co).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let got = conv2d(&x, &weights, &bias, k, stride).unwrap();
            let want = naive_conv(&x, &weights, &bias, k, stride);
            assert!(got.same_shape(&want));
            for (a, b) in got.values().iter().zip(want.values()) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn one_by_one_kernel_scales_and_shifts() {
        let x = SquareTensor::from_values(1, 1, 2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let out = conv2d(&x, &[2.0], &[0.5], 1, 1).unwrap();
        assert_eq!(out.values(), &[2.5, 4.5, 6.5, 8.5]);
    }

    #[test]
    fn all_ones_kernel_counts_in_grid_neighbors() {
        let x = SquareTensor::from_values(1, 1, 4, 4, vec![1.0; 16]).unwrap();
        let out = conv2d(&x, &vec![1.0; 9], &[0.0], 3, 1).unwrap();
        assert_eq!(out.get(0, 0, 0, 0), 4.0);
        assert_eq!(out.get(0, 0, 0, 1), 6.0);
        assert_eq!(out.get(0, 0, 1, 1), 9.0);
        assert_eq!(out.get(0, 0, 3, 3), 4.0);
    }

    #[test]
    fn rejects_even_kernel_and_zero_stride() {
        let x = SquareTensor::zeros(1, 1, 4, 4);
        assert!(matches!(
            conv2d(&x, &vec![0.0; 4], &[0.0], 2, 1),
            Err(NnError::EvenSquareKernel { k: 2 })
        ));
        assert!(matches!(
            conv2d(&x, &vec![0.0; 9], &[0.0], 3, 0),
            Err(NnError::ZeroStride)
        ));
        assert!(matches!(
            conv2d(&x, &vec![0.0; 8], &[0.0], 3, 1),
            Err(NnError::ValueCount { expected: 9, got: 8 })
        ));
    }

    #[test]
    fn conv_backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (batch, ci, co, rows, cols, k, stride) = (2, 2, 2, 5, 4, 3, 1);
        let x = random_tensor(&mut rng, batch, ci, rows, cols);
        let mut weights: Vec<f64> = (0..co * ci * k * k)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let mut bias: Vec<f64> = (0..co).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let go = random_tensor(&mut rng, batch, co, rows, cols);

        let loss = |x: &SquareTensor, w: &[f64], b: &[f64]| -> f64 {
            conv2d(x, w, b, k, stride)
                .unwrap()
                .values()
                .iter()
                .zip(go.values())
                .map(|(o, g)| o * g)
                .sum()
        };
        let grads = conv2d_backward(&x, &weights, &bias, k, stride, &go).unwrap();

        let eps = 1e-6;
        for i in 0..weights.len() {
            let orig = weights[i];
            weights[i] = orig + eps;
            let up = loss(&x, &weights, &bias);
            weights[i] = orig - eps;
            let down = loss(&x, &weights, &bias);
            weights[i] = orig;
            let fd = (up - down) / (2.0 * eps);
            assert!(
                (grads.grad_w[i] - fd).abs() / fd.abs().max(1e-8) < 1e-5,
                "weight {i}: {} vs {fd}",
                grads.grad_w[i]
            );
        }
        for o in 0..co {
            let orig = bias[o];
            bias[o] = orig + eps;
            let up = loss(&x, &weights, &bias);
            bias[o] = orig - eps;
            let down = loss(&x, &weights, &bias);
            bias[o] = orig;
            let fd = (up - down) / (2.0 * eps);
            assert!((grads.grad_b[o] - fd).abs() / fd.abs().max(1e-8) < 1e-5);
        }
        let mut xv = x.clone();
        for i in 0..xv.values().len() {
            let orig = xv.values()[i];
            xv.values_mut()[i] = orig + eps;
            let up = loss(&xv, &weights, &bias);
            xv.values_mut()[i] = orig - eps;
            let down = loss(&xv, &weights, &bias);
            xv.values_mut()[i] = orig;
            let fd = (up - down) / (2.0 * eps);
            assert!(
                (grads.grad_x.values()[i] - fd).abs() / fd.abs().max(1e-8) < 1e-5,
                "input {i}: {} vs {fd}",
                grads.grad_x.values()[i]
            );
        }
    }

    #[test]
    fn max_pool_two_by_two_halves_a_known_plane() {
        let x = SquareTensor::from_values(
            1,
            1,
            4,
            4,
            vec![
                1.0, 2.0, 5.0, 0.0, //
                3.0, 4.0, 1.0, 1.0, //
                0.0, 0.0, 2.0, 2.0, //
                9.0, 1.0, 2.0, 3.0,
            ],
        )
        .unwrap();
        let out = max_pool(&x, 2, 2).unwrap();
        assert_eq!(out.rows(), 2);
        assert_eq!(out.cols(), 2);
        assert_eq!(out.values(), &[4.0, 5.0, 9.0, 3.0]);
    }

    #[test]
    fn max_pool_matches_naive_window_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for &(rows, cols, k, stride) in &[(6usize, 6usize, 2usize, 2usize), (7, 5, 3, 2), (5, 5, 3, 1)] {
            let x = random_tensor(&mut rng, 2, 2, rows, cols);
            let out = max_pool(&x, k, stride).unwrap();
            for b in 0..2 {
                for c in 0..2 {
                    for y in 0..out.rows() {
                        for xi in 0..out.cols() {
                            let mut want = f64::NEG_INFINITY;
                            for ky in 0..k {
                                for kx in 0..k {
                                    want = want.max(x.get(b, c, stride * y + ky, stride * xi + kx));
                                }
                            }
                            assert_eq!(out.get(b, c, y, xi), want);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn max_pool_backward_routes_to_first_max() {
        let x = SquareTensor::from_values(1, 1, 2, 2, vec![3.0, 3.0, 1.0, 3.0]).unwrap();
        let go = SquareTensor::from_values(1, 1, 1, 1, vec![2.0]).unwrap();
        let gx = max_pool_backward(&x, 2, 2, &go).unwrap();
        assert_eq!(gx.values(), &[2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn max_pool_backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let x = random_tensor(&mut rng, 1, 2, 6, 6);
        let go = random_tensor(&mut rng, 1, 2, 3, 3);
        let gx = max_pool_backward(&x, 2, 2, &go).unwrap();
        let loss = |x: &SquareTensor| -> f64 {
            max_pool(x, 2, 2)
                .unwrap()
                .values()
                .iter()
                .zip(go.values())
                .map(|(o, g)| o * g)
                .sum()
        };
        let eps = 1e-6;
        let mut xv = x.clone();
        for i in 0..xv.values().len() {
            let orig = xv.values()[i];
            xv.values_mut()[i] = orig + eps;
            let up = loss(&xv);
            xv.values_mut()[i] = orig - eps;
            let down = loss(&xv);
            xv.values_mut()[i] = orig;
            let fd = (up - down) / (2.0 * eps);
            assert!(
                (gx.values()[i] - fd).abs() < 1e-4,
                "input {i}: {} vs {fd}",
                gx.values()[i]
            );
        }
    }

    #[test]
    fn pool_window_must_fit() {
        let x = SquareTensor::zeros(1, 1, 3, 3);
        assert!(max_pool(&x, 4, 2).is_err());
        assert!(max_pool(&x, 2, 0).is_err());
    }
}
