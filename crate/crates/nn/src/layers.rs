//! The closed set of layer kinds used by the experiment models.
//!
//! Each layer is a pure function of its input plus (for conv/dense) its own
//! parameters. `forward` never mutates; `backward` takes the layer's original
//! input and the output gradient and returns the input gradient plus, where
//! applicable, parameter gradients aligned with `params_mut`.

use hexgrid_core::{engine, HexKernel, HexTensor, PoolMode};

use crate::act::{Act, Matrix};
use crate::square;
use crate::NnError;

/// Gradients for one layer's parameters, aligned with [`Layer::params_mut`].
#[derive(Debug, Clone)]
pub struct ParamGrad {
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum Layer {
    HexConv {
        kernel: HexKernel,
        stride: usize,
    },
    SquareConv {
        k: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
        stride: usize,
    },
    HexMaxPool {
        n: u32,
        stride: usize,
    },
    SquareMaxPool {
        k: usize,
        stride: usize,
    },
    Dense {
        nin: usize,
        nout: usize,
        /// Row-major `nin x nout`: weight (i, o) sits at `i * nout + o`.
        weights: Vec<f64>,
        bias: Vec<f64>,
    },
    Relu,
    Flatten,
}

/// Dot product accumulated over eight independent lanes so the reduction
/// vectorizes; the summation order is fixed but differs from a naive fold.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut lanes = [0.0f64; 8];
    let chunks = a.len() / 8;
    for c in 0..chunks {
        let (pa, pb) = (&a[c * 8..c * 8 + 8], &b[c * 8..c * 8 + 8]);
        for l in 0..8 {
            lanes[l] += pa[l] * pb[l];
        }
    }
    let mut tail = 0.0;
    for i in chunks * 8..a.len() {
        tail += a[i] * b[i];
    }
    lanes.iter().sum::<f64>() + tail
}

/// Column-major copy of a batch matrix: feature i's values for all samples
/// sit at `[i * rows .. (i + 1) * rows]`.
fn transpose(m: &Matrix) -> Vec<f64> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut t = vec![0.0; rows * cols];
    for b in 0..rows {
        for (i, &v) in m.row(b).iter().enumerate() {
            t[i * rows + b] = v;
        }
    }
    t
}

fn as_hex<'a>(x: &'a Act, layer: &str) -> Result<&'a HexTensor, NnError> {
    match x {
        Act::Hex(t) => Ok(t),
        other => Err(NnError::ShapeMismatch(format!(
            "{layer} expects a hex feature map, got {}",
            other.shape_tag()
        ))),
    }
}

fn as_square<'a>(x: &'a Act, layer: &str) -> Result<&'a crate::SquareTensor, NnError> {
    match x {
        Act::Square(t) => Ok(t),
        other => Err(NnError::ShapeMismatch(format!(
            "{layer} expects a square feature map, got {}",
            other.shape_tag()
        ))),
    }
}

fn as_flat<'a>(x: &'a Act, layer: &str) -> Result<&'a Matrix, NnError> {
    match x {
        Act::Flat(m) => Ok(m),
        other => Err(NnError::ShapeMismatch(format!(
            "{layer} expects flat features, got {}",
            other.shape_tag()
        ))),
    }
}

impl Layer {
    pub fn name(&self) -> &'static str {
        match self {
            Layer::HexConv { .. } => "hexconv",
            Layer::SquareConv { .. } => "squareconv",
            Layer::HexMaxPool { .. } => "hexmaxpool",
            Layer::SquareMaxPool { .. } => "squaremaxpool",
            Layer::Dense { .. } => "dense",
            Layer::Relu => "relu",
            Layer::Flatten => "flatten",
        }
    }

    pub fn parameter_count(&self) -> usize {
        match self {
            Layer::HexConv { kernel, .. } => kernel.weights().len() + kernel.bias().len(),
            Layer::SquareConv { weights, bias, .. } => weights.len() + bias.len(),
            Layer::Dense { weights, bias, .. } => weights.len() + bias.len(),
            _ => 0,
        }
    }

    /// Mutable views of (weights, bias) for layers that have them.
    pub fn params_mut(&mut self) -> Option<(&mut [f64], &mut [f64])> {
        match self {
            Layer::HexConv { kernel, .. } => Some(kernel.params_mut()),
            Layer::SquareConv { weights, bias, .. } => Some((weights, bias)),
            Layer::Dense { weights, bias, .. } => Some((weights, bias)),
            _ => None,
        }
    }

    pub fn forward(&self, x: &Act) -> Result<Act, NnError> {
        match self {
            Layer::HexConv { kernel, stride } => {
                let t = as_hex(x, "hexconv")?;
                Ok(Act::Hex(engine::conv2d(t, kernel, *stride)?))
            }
            Layer::SquareConv {
                k,
                weights,
                bias,
                stride,
            } => {
                let t = as_square(x, "squareconv")?;
                Ok(Act::Square(square::conv2d(t, weights, bias, *k, *stride)?))
            }
            Layer::HexMaxPool { n, stride } => {
                let t = as_hex(x, "hexmaxpool")?;
                Ok(Act::Hex(engine::pool2d(t, *n, *stride, PoolMode::Max)?))
            }
            Layer::SquareMaxPool { k, stride } => {
                let t = as_square(x, "squaremaxpool")?;
                Ok(Act::Square(square::max_pool(t, *k, *stride)?))
            }
            Layer::Dense {
                nin,
                nout,
                weights,
                bias,
            } => {
                let m = as_flat(x, "dense")?;
                if m.cols() != *nin {
                    return Err(NnError::ShapeMismatch(format!(
                        "dense expects {nin} features, got {}",
                        m.cols()
                    )));
                }
                let rows = m.rows();
                let mut out = Matrix::zeros(rows, *nout);
                for b in 0..rows {
                    out.row_mut(b).copy_from_slice(bias);
                }
                // Feature-outer order so each weight row is read once per
                // batch instead of once per sample; the batch is transposed
                // up front to keep the inner reads contiguous.
                let xt = transpose(&m);
                for i in 0..*nin {
                    let wrow = &weights[i * nout..(i + 1) * nout];
                    for (b, &xi) in xt[i * rows..(i + 1) * rows].iter().enumerate() {
                        if xi != 0.0 {
                            for (d, w) in out.row_mut(b).iter_mut().zip(wrow) {
                                *d += xi * w;
                            }
                        }
                    }
                }
                Ok(Act::Flat(out))
            }
            Layer::Relu => {
                let mut out = x.clone();
                for v in out.values_mut() {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
                Ok(out)
            }
            Layer::Flatten => {
                let per = x.features_per_sample();
                match x {
                    Act::Hex(_) | Act::Square(_) => Ok(Act::Flat(
                        Matrix::from_values(x.batch(), per, x.values().to_vec())
                            .expect("flatten is a reshape"),
                    )),
                    Act::Flat(_) => Err(NnError::ShapeMismatch(
                        "flatten expects a feature map, got flat features".into(),
                    )),
                }
            }
        }
    }

    /// Input gradient and, for parameterized layers, parameter gradients.
    /// `x` must be the same activation the forward pass consumed.
    pub fn backward(&self, x: &Act, grad_out: &Act) -> Result<(Act, Option<ParamGrad>), NnError> {
        match self {
            Layer::HexConv { kernel, stride } => {
                let t = as_hex(x, "hexconv")?;
                let go = as_hex(grad_out, "hexconv gradient")?;
                let grads = engine::conv2d_backward(go, t, kernel, *stride)?;
                Ok((
                    Act::Hex(grads.grad_x),
                    Some(ParamGrad {
                        w: grads.grad_w,
                        b: grads.grad_b,
                    }),
                ))
            }
            Layer::SquareConv {
                k,
                weights,
                bias,
                stride,
            } => {
                let t = as_square(x, "squareconv")?;
                let go = as_square(grad_out, "squareconv gradient")?;
                let grads = square::conv2d_backward(t, weights, bias, *k, *stride, go)?;
                Ok((
                    Act::Square(grads.grad_x),
                    Some(ParamGrad {
                        w: grads.grad_w,
                        b: grads.grad_b,
                    }),
                ))
            }
            Layer::HexMaxPool { n, stride } => {
                let t = as_hex(x, "hexmaxpool")?;
                let go = as_hex(grad_out, "hexmaxpool gradient")?;
                let gx = engine::pool2d_backward(go, t, *n, *stride, PoolMode::Max)?;
                Ok((Act::Hex(gx), None))
            }
            Layer::SquareMaxPool { k, stride } => {
                let t = as_square(x, "squaremaxpool")?;
                let go = as_square(grad_out, "squaremaxpool gradient")?;
                let gx = square::max_pool_backward(t, *k, *stride, go)?;
                Ok((Act::Square(gx), None))
            }
            Layer::Dense {
                nin,
                nout,
                weights,
                bias,
            } => {
                let m = as_flat(x, "dense")?;
                let go = as_flat(grad_out, "dense gradient")?;
                if go.rows() != m.rows() || go.cols() != *nout {
                    return Err(NnError::ShapeMismatch(format!(
                        "dense gradient is {}x{}, expected {}x{nout}",
                        go.rows(),
                        go.cols(),
                        m.rows()
                    )));
                }
                let rows = m.rows();
                let mut grad_w = vec![0.0; weights.len()];
                let mut grad_b = vec![0.0; bias.len()];
                let mut grad_x = Matrix::zeros(rows, *nin);
                for b in 0..rows {
                    for (gb, g) in grad_b.iter_mut().zip(go.row(b)) {
                        *gb += g;
                    }
                }
                // Feature-outer for the same reason as the forward pass: the
                // weight and weight-gradient rows for feature i stay hot
                // while every sample's output gradient streams past them.
                let xt = transpose(&m);
                for i in 0..*nin {
                    let wrow = &weights[i * nout..(i + 1) * nout];
                    let gwrow = &mut grad_w[i * nout..(i + 1) * nout];
                    let xcol = &xt[i * rows..(i + 1) * rows];
                    for b in 0..rows {
                        let grow = go.row(b);
                        let xi = xcol[b];
                        if xi != 0.0 {
                            for (gw, g) in gwrow.iter_mut().zip(grow) {
                                *gw += xi * g;
                            }
                        }
                        grad_x.row_mut(b)[i] = dot(wrow, grow);
                    }
                }
                Ok((
                    Act::Flat(grad_x),
                    Some(ParamGrad {
                        w: grad_w,
                        b: grad_b,
                    }),
                ))
            }
            Layer::Relu => {
                let mut gx = grad_out.clone();
                if gx.values().len() != x.values().len() {
                    return Err(NnError::ShapeMismatch(
                        "relu gradient does not match its input".into(),
                    ));
                }
                for (g, &v) in gx.values_mut().iter_mut().zip(x.values()) {
                    if v <= 0.0 {
                        *g = 0.0;
                    }
                }
                Ok((gx, None))
            }
            Layer::Flatten => {
                let go = as_flat(grad_out, "flatten gradient")?;
                if go.values().len() != x.values().len() {
                    return Err(NnError::ShapeMismatch(
                        "flatten gradient does not match its input".into(),
                    ));
                }
                let mut gx = x.zeros_like();
                gx.values_mut().copy_from_slice(go.values());
                Ok((gx, None))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::act::hex_act;
    use crate::SquareTensor;
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;

    fn dense(nin: usize, nout: usize, seed: u64) -> Layer {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Layer::Dense {
            nin,
            nout,
            weights: (0..nin * nout).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            bias: (0..nout).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    #[test]
    fn dense_forward_known_values() {
        let layer = Layer::Dense {
            nin: 2,
            nout: 2,
            weights: vec![1.0, 2.0, 3.0, 4.0],
            bias: vec![10.0, 20.0],
        };
        let x = Act::Flat(Matrix::from_values(1, 2, vec![1.0, 1.0]).unwrap());
        let y = layer.forward(&x).unwrap();
        // y_o = b_o + sum_i x_i w[i][o]
        assert_eq!(y.values(), &[14.0, 26.0]);
    }

    #[test]
    fn dense_backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (nin, nout, batch) = (4, 3, 2);
        let layer = dense(nin, nout, 4);
        let x = Act::Flat(
            Matrix::from_values(
                batch,
                nin,
                (0..batch * nin).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )
            .unwrap(),
        );
        let go = Act::Flat(
            Matrix::from_values(
                batch,
                nout,
                (0..batch * nout).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )
            .unwrap(),
        );
        let (gx, pg) = layer.backward(&x, &go).unwrap();
        let pg = pg.unwrap();

        let loss = |layer: &Layer, x: &Act| -> f64 {
            layer
                .forward(x)
                .unwrap()
                .values()
                .iter()
                .zip(go.values())
                .map(|(a, b)| a * b)
                .sum()
        };
        let eps = 1e-6;
        let mut pl = layer.clone();
        for i in 0..pg.w.len() {
            pl.params_mut().unwrap().0[i] += eps;
            let up = loss(&pl, &x);
            pl.params_mut().unwrap().0[i] -= 2.0 * eps;
            let down = loss(&pl, &x);
            pl.params_mut().unwrap().0[i] += eps;
            let fd = (up - down) / (2.0 * eps);
            assert!((pg.w[i] - fd).abs() < 1e-6, "w[{i}]: {} vs {fd}", pg.w[i]);
        }
        let mut xv = x.clone();
        for i in 0..xv.values().len() {
            let orig = xv.values()[i];
            xv.values_mut()[i] = orig + eps;
            let up = loss(&layer, &xv);
            xv.values_mut()[i] = orig - eps;
            let down = loss(&layer, &xv);
            xv.values_mut()[i] = orig;
            let fd = (up - down) / (2.0 * eps);
            assert!((gx.values()[i] - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn relu_clamps_and_masks() {
        let x = Act::Flat(Matrix::from_values(1, 4, vec![-1.0, 0.0, 2.0, -0.5]).unwrap());
        let y = Layer::Relu.forward(&x).unwrap();
        assert_eq!(y.values(), &[0.0, 0.0, 2.0, 0.0]);
        let go = Act::Flat(Matrix::from_values(1, 4, vec![1.0, 1.0, 1.0, 1.0]).unwrap());
        let (gx, pg) = Layer::Relu.backward(&x, &go).unwrap();
        assert!(pg.is_none());
        assert_eq!(gx.values(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn flatten_round_trips_hex_maps() {
        let x = hex_act(2, 2, 2, 3, (0..24).map(|v| v as f64).collect()).unwrap();
        let y = Layer::Flatten.forward(&x).unwrap();
        match &y {
            Act::Flat(m) => {
                assert_eq!(m.rows(), 2);
                assert_eq!(m.cols(), 12);
            }
            _ => panic!("expected flat"),
        }
        assert_eq!(y.values(), x.values());
        let (gx, _) = Layer::Flatten.backward(&x, &y).unwrap();
        match &gx {
            Act::Hex(t) => assert_eq!(t.rows(), 2),
            _ => panic!("expected hex gradient"),
        }
        assert_eq!(gx.values(), x.values());
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let x = Act::Square(SquareTensor::zeros(1, 1, 4, 4));
        let layer = Layer::HexMaxPool { n: 1, stride: 2 };
        assert!(matches!(
            layer.forward(&x),
            Err(NnError::ShapeMismatch(_))
        ));
        let flat = Act::Flat(Matrix::zeros(1, 4));
        assert!(matches!(
            Layer::Flatten.forward(&flat),
            Err(NnError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn params_mut_aligns_with_parameter_count() {
        let mut layer = dense(3, 2, 9);
        assert_eq!(layer.parameter_count(), 8);
        let (w, b) = layer.params_mut().unwrap();
        assert_eq!(w.len() + b.len(), 8);
        assert!(Layer::Relu.params_mut().is_none());
    }

    #[test]
    fn hexconv_layer_wraps_engine() {
        let kernel = HexKernel::debug(1, 1);
        let layer = Layer::HexConv { kernel, stride: 1 };
        let x = hex_act(1, 1, 3, 3, vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let y = layer.forward(&x).unwrap();
        // debug kernel sums the 7-cell neighborhood: impulse spreads to it
        let total: f64 = y.values().iter().sum();
        assert_eq!(total, 7.0);
    }
}
