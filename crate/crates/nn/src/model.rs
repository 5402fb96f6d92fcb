//! Model configuration, seeded initialization, and whole-network passes.

use hexgrid_core::{HexKernel, KernelLayout};
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

use crate::act::Act;
use crate::layers::{Layer, ParamGrad};
use crate::NnError;

/// Declarative layer description; widths and strides only, no weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerSpec {
    HexConv {
        n: u32,
        in_ch: usize,
        out_ch: usize,
        stride: usize,
    },
    SquareConv {
        k: usize,
        in_ch: usize,
        out_ch: usize,
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
    },
    Relu,
    Flatten,
}

impl LayerSpec {
    pub fn parameter_count(&self) -> usize {
        match *self {
            LayerSpec::HexConv { n, in_ch, out_ch, .. } => {
                out_ch * (in_ch * KernelLayout::new(n).element_count() + 1)
            }
            LayerSpec::SquareConv { k, in_ch, out_ch, .. } => out_ch * (in_ch * k * k + 1),
            LayerSpec::Dense { nin, nout } => nout * (nin + 1),
            _ => 0,
        }
    }
}

/// Total trainable parameters across a layer stack.
pub fn parameter_count(layers: &[LayerSpec]) -> usize {
    layers.iter().map(LayerSpec::parameter_count).sum()
}

#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub name: String,
    pub seed: u64,
    pub layers: Vec<LayerSpec>,
}

#[derive(Debug, Clone)]
pub struct Model {
    layers: Vec<Layer>,
}

/// Uniform `+-sqrt(1/fan_in)` weights, zero biases, drawn in layer order
/// from one ChaCha8 stream so the whole initialization is pinned by the seed.
pub fn init_model(cfg: &ModelConfig) -> Result<Model, NnError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = |count: usize, fan_in: usize| -> Vec<f64> {
        let lim = (1.0 / fan_in as f64).sqrt();
        (0..count).map(|_| rng.gen_range(-lim..lim)).collect()
    };
    let mut layers = Vec::with_capacity(cfg.layers.len());
    for spec in &cfg.layers {
        let layer = match *spec {
            LayerSpec::HexConv {
                n,
                in_ch,
                out_ch,
                stride,
            } => {
                let per = KernelLayout::new(n).element_count();
                let weights = draw(out_ch * in_ch * per, in_ch * per);
                let kernel = HexKernel::new(n, out_ch, in_ch, weights, Some(vec![0.0; out_ch]))?;
                Layer::HexConv { kernel, stride }
            }
            LayerSpec::SquareConv {
                k,
                in_ch,
                out_ch,
                stride,
            } => Layer::SquareConv {
                k,
                weights: draw(out_ch * in_ch * k * k, in_ch * k * k),
                bias: vec![0.0; out_ch],
                stride,
            },
            LayerSpec::HexMaxPool { n, stride } => Layer::HexMaxPool { n, stride },
            LayerSpec::SquareMaxPool { k, stride } => Layer::SquareMaxPool { k, stride },
            LayerSpec::Dense { nin, nout } => Layer::Dense {
                nin,
                nout,
                weights: draw(nin * nout, nin),
                bias: vec![0.0; nout],
            },
            LayerSpec::Relu => Layer::Relu,
            LayerSpec::Flatten => Layer::Flatten,
        };
        layers.push(layer);
    }
    Ok(Model { layers })
}

impl Model {
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(Layer::parameter_count).sum()
    }

    /// Inference pass.
    pub fn forward(&self, x: &Act) -> Result<Act, NnError> {
        let mut cur = x.clone();
        for layer in &self.layers {
            cur = layer.forward(&cur)?;
        }
        Ok(cur)
    }

    /// Training pass: returns each layer's input (needed by `backward`)
    /// along with the final output.
    pub fn forward_cached(&self, x: &Act) -> Result<(Vec<Act>, Act), NnError> {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        for layer in &self.layers {
            let next = layer.forward(&cur)?;
            inputs.push(cur);
            cur = next;
        }
        Ok((inputs, cur))
    }

    /// Backpropagates `grad_out` through the stack. `inputs` must come from
    /// `forward_cached` on the same parameters. Returns the gradient with
    /// respect to the network input and per-layer parameter gradients
    /// aligned with `layers`.
    pub fn backward(
        &self,
        inputs: &[Act],
        grad_out: &Act,
    ) -> Result<(Act, Vec<Option<ParamGrad>>), NnError> {
        if inputs.len() != self.layers.len() {
            return Err(NnError::ShapeMismatch(format!(
                "{} cached inputs for {} layers",
                inputs.len(),
                self.layers.len()
            )));
        }
        let mut grads = vec![None; self.layers.len()];
        let mut g = grad_out.clone();
        for (i, (layer, input)) in self.layers.iter().zip(inputs).enumerate().rev() {
            let (gx, pg) = layer.backward(input, &g)?;
            grads[i] = pg;
            g = gx;
        }
        Ok((g, grads))
    }
}
