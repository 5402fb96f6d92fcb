//! The training loop: shuffled mini-batch SGD with momentum, softmax
//! cross-entropy, running training accuracy, and plateau-halved learning
//! rate. Everything is pinned by the caller's seed.

use rand::seq::SliceRandom as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use crate::act::Act;
use crate::loss::{argmax, softmax_cross_entropy};
use crate::model::Model;
use crate::optim::{Plateau, Sgd};
use crate::NnError;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub momentum: f64,
    /// Minimum epoch-loss improvement that counts as progress.
    pub plateau_threshold: f64,
    /// Epochs without progress before the learning rate is halved.
    pub plateau_patience: usize,
    pub lr_factor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            batch_size: 32,
            lr: 0.05,
            momentum: 0.9,
            plateau_threshold: 1e-4,
            plateau_patience: 8,
            lr_factor: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStat {
    pub epoch: usize,
    /// Running training accuracy: predictions taken on each batch before
    /// its update, averaged over the epoch.
    pub accuracy: f64,
    pub loss: f64,
    pub lr: f64,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub curve: Vec<EpochStat>,
    /// Loss left the finite range; the curve stops at that epoch.
    pub diverged: bool,
}

impl TrainResult {
    pub fn final_accuracy(&self) -> f64 {
        self.curve.last().map_or(0.0, |s| s.accuracy)
    }

    pub fn final_loss(&self) -> f64 {
        self.curve.last().map_or(f64::INFINITY, |s| s.loss)
    }
}

/// Trains `model` in place on `(data, labels)`.
pub fn train(
    model: &mut Model,
    data: &Act,
    labels: &[usize],
    cfg: &TrainConfig,
    seed: u64,
) -> Result<TrainResult, NnError> {
    let n = data.batch();
    if n == 0 {
        return Err(NnError::EmptyBatch);
    }
    if labels.len() != n {
        return Err(NnError::LabelCount {
            batch: n,
            labels: labels.len(),
        });
    }
    if cfg.batch_size == 0 {
        return Err(NnError::EmptyBatch);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut opt = Sgd::new(model, cfg.lr, cfg.momentum);
    let mut plateau = Plateau::new(cfg.plateau_threshold, cfg.plateau_patience);
    let mut order: Vec<usize> = (0..n).collect();
    let mut curve = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut correct = 0usize;
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch = data.gather(chunk);
            let batch_labels: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
            let (inputs, logits) = model.forward_cached(&batch)?;
            let logits = match logits {
                Act::Flat(m) => m,
                other => {
                    return Err(NnError::ShapeMismatch(format!(
                        "model output must be flat logits, got {}",
                        other.shape_tag()
                    )))
                }
            };
            for (b, &y) in batch_labels.iter().enumerate() {
                if argmax(logits.row(b)) == y {
                    correct += 1;
                }
            }
            let (loss, grad) = softmax_cross_entropy(&logits, &batch_labels)?;
            loss_sum += loss * chunk.len() as f64;
            let (_, grads) = model.backward(&inputs, &Act::Flat(grad))?;
            opt.step(model, &grads);
        }
        let loss = loss_sum / n as f64;
        let stat = EpochStat {
            epoch,
            accuracy: correct as f64 / n as f64,
            loss,
            lr: opt.lr(),
        };
        curve.push(stat);
        if !loss.is_finite() {
            return Ok(TrainResult {
                curve,
                diverged: true,
            });
        }
        if plateau.update(loss) {
            opt.set_lr(opt.lr() * cfg.lr_factor);
        }
    }
    Ok(TrainResult {
        curve,
        diverged: false,
    })
}
