//! Whole-stack training behavior on synthetic inputs: memorization power,
//! determinism, and gradient quality under the real loss.

use hexgrid_core::{GridSpec, HexTensor};
use hexgrid_nn::act::{Act, SquareTensor};
use hexgrid_nn::{gradcheck, h_small, init_model, s_small, train, TrainConfig};
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

fn random_hex_batch(n: usize, side: usize, seed: u64) -> Act {
    let grid = GridSpec::new(side, side).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n * grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Act::Hex(HexTensor::from_values(n, 1, grid, values).unwrap())
}

fn random_square_batch(n: usize, side: usize, seed: u64) -> Act {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n * side * side).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Act::Square(SquareTensor::from_values(n, 1, side, side, values).unwrap())
}

fn overfit_cfg() -> TrainConfig {
    TrainConfig {
        epochs: 200,
        batch_size: 8,
        ..TrainConfig::default()
    }
}

// eight arbitrary images, two per class: enough capacity to memorize
#[test]
fn h_small_overfits_a_single_batch() {
    let data = random_hex_batch(8, 16, 100);
    let labels = vec![0, 1, 2, 3, 0, 1, 2, 3];
    let mut model = init_model(&h_small(41)).unwrap();
    let result = train(&mut model, &data, &labels, &overfit_cfg(), 42).unwrap();
    assert!(!result.diverged);
    assert_eq!(
        result.final_accuracy(),
        1.0,
        "last epochs: {:?}",
        &result.curve[result.curve.len().saturating_sub(5)..]
    );
}

#[test]
fn s_small_overfits_a_single_batch() {
    let data = random_square_batch(8, 16, 200);
    let labels = vec![3, 2, 1, 0, 3, 2, 1, 0];
    let mut model = init_model(&s_small(51)).unwrap();
    let result = train(&mut model, &data, &labels, &overfit_cfg(), 52).unwrap();
    assert!(!result.diverged);
    assert_eq!(result.final_accuracy(), 1.0);
}

#[test]
fn identical_seeds_give_identical_models_and_curves() {
    let data = random_hex_batch(16, 16, 300);
    let labels: Vec<usize> = (0..16).map(|i| i % 4).collect();
    let cfg = TrainConfig {
        epochs: 6,
        ..TrainConfig::default()
    };
    let run = || {
        let mut model = init_model(&h_small(7)).unwrap();
        let result = train(&mut model, &data, &labels, &cfg, 9).unwrap();
        let logits = model.forward(&data).unwrap();
        (result.curve, logits.values().to_vec())
    };
    let (c1, l1) = run();
    let (c2, l2) = run();
    assert_eq!(c1, c2);
    assert_eq!(l1, l2);
}

#[test]
fn end_to_end_gradient_survives_through_the_training_entry_point() {
    // same check the acceptance suite runs, at a different seed
    let err = gradcheck::end_to_end(4242).unwrap();
    assert!(err < 1e-4, "max rel err {err}");
}
