//! Finite-difference verification of every layer's backward pass and of a
//! whole small network under its real loss. Used by tests and the CLI.

use hexgrid_core::{GridSpec, HexKernel, HexTensor, KernelLayout};
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

use crate::act::{Act, Matrix, SquareTensor};
use crate::layers::Layer;
use crate::loss::softmax_cross_entropy;
use crate::model::{init_model, LayerSpec, Model, ModelConfig};
use crate::NnError;

const FD_STEP: f64 = 1e-6;

fn rel_err(analytic: f64, fd: f64) -> f64 {
    (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-8)
}

fn random_hex(rng: &mut ChaCha8Rng, batch: usize, ch: usize, rows: usize, cols: usize) -> Act {
    let grid = GridSpec::new(rows, cols).expect("test grid");
    let values = (0..batch * ch * grid.len())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    Act::Hex(HexTensor::from_values(batch, ch, grid, values).expect("count matches"))
}

fn random_square(rng: &mut ChaCha8Rng, batch: usize, ch: usize, rows: usize, cols: usize) -> Act {
    let values = (0..batch * ch * rows * cols)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    Act::Square(SquareTensor::from_values(batch, ch, rows, cols, values).expect("count matches"))
}

fn random_flat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Act {
    let values = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Act::Flat(Matrix::from_values(rows, cols, values).expect("count matches"))
}

/// `sum(forward(x) * go)`: a scalar whose input/parameter gradients are
/// exactly what `backward` propagates for `grad_out = go`.
fn probe_loss(layer: &Layer, x: &Act, go: &Act) -> f64 {
    layer
        .forward(x)
        .expect("gradcheck forward")
        .values()
        .iter()
        .zip(go.values())
        .map(|(a, b)| a * b)
        .sum()
}

/// Max relative error between analytic and central finite-difference
/// gradients, over every parameter and every input cell of one layer.
fn check_one_layer(layer: &mut Layer, x: &Act, go: &Act) -> f64 {
    let (gx, pg) = layer.backward(x, go).expect("gradcheck backward");
    let mut worst = 0.0f64;

    if let Some(pg) = pg {
        let n_w = pg.w.len();
        let n_b = pg.b.len();
        for i in 0..n_w + n_b {
            let analytic = if i < n_w { pg.w[i] } else { pg.b[i - n_w] };
            let at = |layer: &mut Layer, delta: f64| {
                let (w, b) = layer.params_mut().expect("layer has params");
                if i < n_w {
                    w[i] += delta;
                } else {
                    b[i - n_w] += delta;
                }
            };
            at(layer, FD_STEP);
            let up = probe_loss(layer, x, go);
            at(layer, -2.0 * FD_STEP);
            let down = probe_loss(layer, x, go);
            at(layer, FD_STEP);
            worst = worst.max(rel_err(analytic, (up - down) / (2.0 * FD_STEP)));
        }
    }

    let mut xp = x.clone();
    for i in 0..x.values().len() {
        let orig = xp.values()[i];
        xp.values_mut()[i] = orig + FD_STEP;
        let up = probe_loss(layer, &xp, go);
        xp.values_mut()[i] = orig - FD_STEP;
        let down = probe_loss(layer, &xp, go);
        xp.values_mut()[i] = orig;
        worst = worst.max(rel_err(gx.values()[i], (up - down) / (2.0 * FD_STEP)));
    }
    worst
}

/// One finite-difference sweep per layer kind, at small representative
/// shapes. Returns `(label, max relative error)` pairs.
pub fn layer_reports(seed: u64) -> Vec<(String, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    let mut push = |label: &str, layer: &mut Layer, x: &Act, rng: &mut ChaCha8Rng| {
        let go = {
            let out = layer.forward(x).expect("gradcheck forward");
            let mut g = out.zeros_like();
            for v in g.values_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            g
        };
        reports.push((label.to_string(), check_one_layer(layer, x, &go)));
    };

    let per = KernelLayout::new(1).element_count();
    for stride in [1usize, 2] {
        let mut rng2 = ChaCha8Rng::seed_from_u64(seed ^ stride as u64);
        let weights = (0..2 * 2 * per).map(|_| rng2.gen_range(-1.0..1.0)).collect();
        let bias = (0..2).map(|_| rng2.gen_range(-0.5..0.5)).collect();
        let mut layer = Layer::HexConv {
            kernel: HexKernel::new(1, 2, 2, weights, Some(bias)).expect("kernel shape"),
            stride,
        };
        let x = random_hex(&mut rng, 2, 2, 5, 6);
        push(&format!("hexconv/s{stride}"), &mut layer, &x, &mut rng);
    }

    {
        let mut layer = Layer::SquareConv {
            k: 3,
            weights: (0..2 * 2 * 9).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            bias: vec![0.1, -0.2],
            stride: 1,
        };
        let x = random_square(&mut rng, 2, 2, 6, 5);
        push("squareconv/s1", &mut layer, &x, &mut rng);
    }

    {
        let mut layer = Layer::HexMaxPool { n: 1, stride: 2 };
        let x = random_hex(&mut rng, 2, 2, 6, 6);
        push("hexmaxpool/s2", &mut layer, &x, &mut rng);
    }

    {
        let mut layer = Layer::SquareMaxPool { k: 2, stride: 2 };
        let x = random_square(&mut rng, 2, 2, 6, 6);
        push("squaremaxpool/s2", &mut layer, &x, &mut rng);
    }

    {
        let mut layer = Layer::Dense {
            nin: 7,
            nout: 5,
            weights: (0..35).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            bias: (0..5).map(|_| rng.gen_range(-0.5..0.5)).collect(),
        };
        let x = random_flat(&mut rng, 3, 7);
        push("dense", &mut layer, &x, &mut rng);
    }

    {
        let mut layer = Layer::Relu;
        let x = random_flat(&mut rng, 2, 9);
        push("relu", &mut layer, &x, &mut rng);
    }

    {
        let mut layer = Layer::Flatten;
        let x = random_hex(&mut rng, 2, 2, 3, 4);
        push("flatten", &mut layer, &x, &mut rng);
    }

    reports
}

fn tiny_hex_model(seed: u64) -> Model {
    init_model(&ModelConfig {
        name: "gradcheck".into(),
        seed,
        layers: vec![
            LayerSpec::HexConv {
                n: 1,
                in_ch: 1,
                out_ch: 2,
                stride: 1,
            },
            LayerSpec::Relu,
            LayerSpec::HexMaxPool { n: 1, stride: 2 },
            LayerSpec::Flatten,
            LayerSpec::Dense { nin: 18, nout: 4 },
        ],
    })
    .expect("fixed config")
}

fn model_loss(model: &Model, x: &Act, labels: &[usize]) -> f64 {
    let logits = match model.forward(x).expect("gradcheck forward") {
        Act::Flat(m) => m,
        _ => unreachable!("model ends in dense"),
    };
    softmax_cross_entropy(&logits, labels).expect("valid labels").0
}

/// Finite-difference check of a whole small hex network under softmax
/// cross-entropy: every weight and bias, plus the input gradient. Returns
/// the max relative error.
pub fn end_to_end(seed: u64) -> Result<f64, NnError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = tiny_hex_model(seed.wrapping_add(1));
    let x = random_hex(&mut rng, 3, 1, 6, 6);
    let labels: Vec<usize> = (0..3).map(|_| rng.gen_range(0..4)).collect();

    let (inputs, logits) = model.forward_cached(&x)?;
    let logits = match logits {
        Act::Flat(m) => m,
        _ => unreachable!(),
    };
    let (_, grad) = softmax_cross_entropy(&logits, &labels)?;
    let (gx, grads) = model.backward(&inputs, &Act::Flat(grad))?;

    let mut worst = 0.0f64;
    for li in 0..grads.len() {
        let Some(pg) = &grads[li] else { continue };
        let analytic: Vec<f64> = pg.w.iter().chain(&pg.b).copied().collect();
        let n_w = pg.w.len();
        for (i, &a) in analytic.iter().enumerate() {
            let at = |model: &mut Model, delta: f64| {
                let (w, b) = model.layers_mut()[li].params_mut().expect("param layer");
                if i < n_w {
                    w[i] += delta;
                } else {
                    b[i - n_w] += delta;
                }
            };
            at(&mut model, FD_STEP);
            let up = model_loss(&model, &x, &labels);
            at(&mut model, -2.0 * FD_STEP);
            let down = model_loss(&model, &x, &labels);
            at(&mut model, FD_STEP);
            worst = worst.max(rel_err(a, (up - down) / (2.0 * FD_STEP)));
        }
    }

    let mut xp = x.clone();
    for i in 0..x.values().len() {
        let orig = xp.values()[i];
        xp.values_mut()[i] = orig + FD_STEP;
        let up = model_loss(&model, &xp, &labels);
        xp.values_mut()[i] = orig - FD_STEP;
        let down = model_loss(&model, &xp, &labels);
        xp.values_mut()[i] = orig;
        worst = worst.max(rel_err(gx.values()[i], (up - down) / (2.0 * FD_STEP)));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_layer_kind_passes_finite_differences() {
        for (label, err) in layer_reports(2024) {
            assert!(err < 1e-5, "{label}: max rel err {err}");
        }
    }

    #[test]
    fn whole_network_gradient_matches_finite_differences() {
        let err = end_to_end(77).unwrap();
        assert!(err < 1e-4, "end-to-end max rel err {err}");
    }
}
