//! SGD with classical momentum and a reduce-on-plateau learning-rate rule.

use crate::layers::ParamGrad;
use crate::model::Model;

/// `v <- momentum * v - lr * g; w <- w + v`, per parameter tensor.
pub struct Sgd {
    lr: f64,
    momentum: f64,
    velocity: Vec<Option<(Vec<f64>, Vec<f64>)>>,
}

impl Sgd {
    pub fn new(model: &mut Model, lr: f64, momentum: f64) -> Self {
        let velocity = model
            .layers_mut()
            .iter_mut()
            .map(|layer| {
                layer
                    .params_mut()
                    .map(|(w, b)| (vec![0.0; w.len()], vec![0.0; b.len()]))
            })
            .collect();
        Sgd {
            lr,
            momentum,
            velocity,
        }
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    pub fn set_lr(&mut self, lr: f64) {
        self.lr = lr;
    }

    pub fn step(&mut self, model: &mut Model, grads: &[Option<ParamGrad>]) {
        for ((layer, grad), vel) in model
            .layers_mut()
            .iter_mut()
            .zip(grads)
            .zip(&mut self.velocity)
        {
            let (Some((w, b)), Some(g), Some((vw, vb))) = (layer.params_mut(), grad, vel) else {
                continue;
            };
            for ((wi, vi), gi) in w.iter_mut().zip(vw.iter_mut()).zip(&g.w) {
                *vi = self.momentum * *vi - self.lr * gi;
                *wi += *vi;
            }
            for ((bi, vi), gi) in b.iter_mut().zip(vb.iter_mut()).zip(&g.b) {
                *vi = self.momentum * *vi - self.lr * gi;
                *bi += *vi;
            }
        }
    }
}

/// Halve-on-plateau schedule: when the epoch loss has not improved on the
/// best seen by more than `threshold` for `patience` consecutive epochs,
/// report that the learning rate should shrink and restart the count.
pub struct Plateau {
    threshold: f64,
    patience: usize,
    best: f64,
    wait: usize,
}

impl Plateau {
    pub fn new(threshold: f64, patience: usize) -> Self {
        Plateau {
            threshold,
            patience,
            best: f64::INFINITY,
            wait: 0,
        }
    }

    /// Feed one epoch loss; true means "reduce the learning rate now".
    pub fn update(&mut self, loss: f64) -> bool {
        if loss < self.best - self.threshold {
            self.best = loss;
            self.wait = 0;
            return false;
        }
        self.wait += 1;
        if self.wait >= self.patience {
            self.wait = 0;
            return true;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::Layer;
    use crate::model::{init_model, LayerSpec, ModelConfig};

    fn one_dense_model() -> Model {
        init_model(&ModelConfig {
            name: "t".into(),
            seed: 0,
            layers: vec![LayerSpec::Dense { nin: 1, nout: 1 }],
        })
        .unwrap()
    }

    fn weight(model: &Model) -> f64 {
        match &model.layers()[0] {
            Layer::Dense { weights, .. } => weights[0],
            _ => unreachable!(),
        }
    }

    #[test]
    fn plain_sgd_steps_against_the_gradient() {
        let mut model = one_dense_model();
        let w0 = weight(&model);
        let mut opt = Sgd::new(&mut model, 0.1, 0.0);
        let g = ParamGrad {
            w: vec![2.0],
            b: vec![-1.0],
        };
        opt.step(&mut model, &[Some(g)]);
        assert!((weight(&model) - (w0 - 0.2)).abs() < 1e-15);
    }

    #[test]
    fn momentum_accumulates_velocity() {
        let mut model = one_dense_model();
        let w0 = weight(&model);
        let mut opt = Sgd::new(&mut model, 0.1, 0.9);
        let g = ParamGrad {
            w: vec![1.0],
            b: vec![0.0],
        };
        opt.step(&mut model, &[Some(g.clone())]);
        // v1 = -0.1
        assert!((weight(&model) - (w0 - 0.1)).abs() < 1e-15);
        opt.step(&mut model, &[Some(g)]);
        // v2 = 0.9 * -0.1 - 0.1 = -0.19
        assert!((weight(&model) - (w0 - 0.29)).abs() < 1e-15);
    }

    #[test]
    fn sgd_converges_on_a_quadratic() {
        let mut model = one_dense_model();
        let mut opt = Sgd::new(&mut model, 0.2, 0.5);
        // minimize (w - 3)^2 via its gradient 2(w - 3)
        for _ in 0..200 {
            let g = 2.0 * (weight(&model) - 3.0);
            opt.step(
                &mut model,
                &[Some(ParamGrad {
                    w: vec![g],
                    b: vec![0.0],
                })],
            );
        }
        assert!((weight(&model) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn plateau_fires_after_patience_and_resets() {
        let mut p = Plateau::new(1e-4, 3);
        assert!(!p.update(1.0));
        assert!(!p.update(0.9));
        // three non-improving epochs in a row
        assert!(!p.update(0.9));
        assert!(!p.update(0.95));
        assert!(p.update(0.9));
        // count restarted
        assert!(!p.update(0.9));
        // a real improvement also restarts it
        assert!(!p.update(0.5));
        assert!(!p.update(0.5));
        assert!(!p.update(0.5));
        assert!(p.update(0.5));
    }

    #[test]
    fn plateau_ignores_sub_threshold_improvements() {
        let mut p = Plateau::new(1e-2, 2);
        assert!(!p.update(1.0));
        assert!(!p.update(0.995));
        assert!(p.update(0.991));
    }
}
