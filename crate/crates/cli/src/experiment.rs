//! The resampling comparison: one noisy hex dataset per iteration, viewed
//! natively and through two square rasters, each view training its matched
//! model. Iterations are independent and seeded, so results do not depend
//! on how they are scheduled across threads.

use std::path::Path;

use hexgrid_core::{HexTensor, SquareTensor};
use hexgrid_datagen::{build_dataset, Dataset, DatasetConfig};
use hexgrid_nn::{
    h_small, init_model, parameter_count, s_large, s_small, train, Act, ModelConfig, TrainConfig,
    TrainResult,
};
use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::CliError;
use crate::formats::{write_atomic, write_hexcsv, write_squarecsv};
use crate::svg::{curve_svg, CurveSeries};

pub const MODEL_NAMES: [&str; 3] = ["h-small", "s-small", "s-large"];
const MODEL_COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];
pub const CHANCE: f64 = 0.25;
/// Master seed the CLI uses when none is given.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone)]
pub struct ModelSummary {
    pub model: &'static str,
    pub iterations: usize,
    /// Fraction of iterations whose training accuracy hit 1.0 at any epoch.
    pub fraction_reached_full: f64,
    /// Fraction of iterations finishing above chance accuracy.
    pub fraction_above_chance: f64,
    pub mean_final_accuracy: f64,
    pub diverged: usize,
    pub parameters: usize,
}

#[derive(Debug)]
pub struct ExperimentOutput {
    /// Indexed like `MODEL_NAMES`.
    pub summaries: Vec<ModelSummary>,
    pub curve_rows: usize,
}

struct IterationSeeds {
    dataset: u64,
    init: [u64; 3],
    train: [u64; 3],
}

/// One independent seed stream per iteration, drawn up front in a fixed
/// order so parallel scheduling cannot reorder them.
fn derive_seeds(seed: u64, iterations: usize) -> Vec<IterationSeeds> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..iterations)
        .map(|_| IterationSeeds {
            dataset: master.gen(),
            init: [master.gen(), master.gen(), master.gen()],
            train: [master.gen(), master.gen(), master.gen()],
        })
        .collect()
}

fn model_configs(seeds: &IterationSeeds) -> [ModelConfig; 3] {
    [
        h_small(seeds.init[0]),
        s_small(seeds.init[1]),
        s_large(seeds.init[2]),
    ]
}

fn run_iteration(seeds: &IterationSeeds) -> Result<[TrainResult; 3], CliError> {
    let cfg = TrainConfig::default();
    let Dataset {
        hex,
        square_small,
        square_large,
        labels,
    } = build_dataset(&DatasetConfig {
        seed: seeds.dataset,
        ..DatasetConfig::default()
    })?;
    let configs = model_configs(seeds);
    let data = [
        Act::Hex(hex),
        Act::Square(square_small),
        Act::Square(square_large),
    ];
    let mut results = Vec::with_capacity(3);
    for (i, cfg_m) in configs.iter().enumerate() {
        let mut model = init_model(cfg_m)?;
        results.push(train(&mut model, &data[i], &labels, &cfg, seeds.train[i])?);
    }
    Ok(results.try_into().expect("exactly three results"))
}

fn thread_cap() -> Result<usize, CliError> {
    match std::env::var("HEXGRID_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError::Usage(format!("HEXGRID_THREADS must be a positive integer, got {v:?}"))),
        Err(_) => Ok(0), // rayon's "use machine parallelism"
    }
}

fn hex_sample(x: &HexTensor, i: usize) -> Result<HexTensor, CliError> {
    Ok(HexTensor::from_values(1, 1, *x.grid(), x.plane(i, 0).to_vec())?)
}

fn square_sample(x: &SquareTensor, i: usize) -> Result<SquareTensor, CliError> {
    Ok(SquareTensor::from_values(1, 1, x.rows(), x.cols(), x.plane(i, 0).to_vec())?)
}

/// Writes one image per class from the first iteration's dataset, in the
/// native hex format and both square raster variants.
fn write_samples(out: &Path, dataset_seed: u64) -> Result<(), CliError> {
    let ds = build_dataset(&DatasetConfig {
        seed: dataset_seed,
        ..DatasetConfig::default()
    })?;
    let dir = out.join("samples");
    for class in 0..4usize {
        debug_assert_eq!(ds.labels[class], class); // labels interleave by index
        write_atomic(
            &dir.join(format!("class{class}.hexcsv")),
            &write_hexcsv(&hex_sample(&ds.hex, class)?)?,
        )?;
        write_atomic(
            &dir.join(format!("class{class}_small.squarecsv")),
            &write_squarecsv(&square_sample(&ds.square_small, class)?)?,
        )?;
        write_atomic(
            &dir.join(format!("class{class}_large.squarecsv")),
            &write_squarecsv(&square_sample(&ds.square_large, class)?)?,
        )?;
    }
    Ok(())
}

fn summarize(
    model_idx: usize,
    results: &[[TrainResult; 3]],
    parameters: usize,
) -> ModelSummary {
    let n = results.len();
    let mut full = 0usize;
    let mut above = 0usize;
    let mut diverged = 0usize;
    let mut acc_sum = 0.0;
    for r in results {
        let r = &r[model_idx];
        if r.curve.iter().any(|s| s.accuracy >= 1.0) {
            full += 1;
        }
        if r.final_accuracy() > CHANCE {
            above += 1;
        }
        if r.diverged {
            diverged += 1;
        }
        acc_sum += r.final_accuracy();
    }
    ModelSummary {
        model: MODEL_NAMES[model_idx],
        iterations: n,
        fraction_reached_full: full as f64 / n as f64,
        fraction_above_chance: above as f64 / n as f64,
        mean_final_accuracy: acc_sum / n as f64,
        diverged,
        parameters,
    }
}

pub fn run(iterations: usize, seed: u64, out: &Path) -> Result<ExperimentOutput, CliError> {
    if iterations == 0 {
        return Err(CliError::Usage("--iterations must be at least 1".into()));
    }
    let seeds = derive_seeds(seed, iterations);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap()?)
        .build()
        .map_err(|e| CliError::Data(e.to_string()))?;
    let results: Vec<[TrainResult; 3]> =
        pool.install(|| seeds.par_iter().map(run_iteration).collect::<Result<_, _>>())?;

    std::fs::create_dir_all(out)?;
    let mut curves = String::from("model,iteration,epoch,accuracy,loss,lr\n");
    let mut curve_rows = 0usize;
    let mut series = Vec::new();
    for (m, name) in MODEL_NAMES.iter().enumerate() {
        for (it, r) in results.iter().enumerate() {
            let r = &r[m];
            for s in &r.curve {
                curves.push_str(&format!(
                    "{name},{it},{},{:.6},{:.10e},{:.10e}\n",
                    s.epoch, s.accuracy, s.loss, s.lr
                ));
                curve_rows += 1;
            }
            series.push(CurveSeries {
                label: (*name).to_string(),
                color: MODEL_COLORS[m],
                points: r.curve.iter().map(|s| (s.epoch as f64, s.accuracy)).collect(),
            });
        }
    }
    write_atomic(&out.join("curves.csv"), &curves)?;

    let params: Vec<usize> = [h_small(0), s_small(0), s_large(0)]
        .iter()
        .map(|c| parameter_count(&c.layers))
        .collect();
    let summaries: Vec<ModelSummary> = (0..3).map(|m| summarize(m, &results, params[m])).collect();
    let mut summary = String::from(
        "model,iterations,fraction_reached_full,fraction_above_chance,mean_final_accuracy,diverged,parameters\n",
    );
    for s in &summaries {
        summary.push_str(&format!(
            "{},{},{:.3},{:.3},{:.6},{},{}\n",
            s.model,
            s.iterations,
            s.fraction_reached_full,
            s.fraction_above_chance,
            s.mean_final_accuracy,
            s.diverged,
            s.parameters
        ));
    }
    write_atomic(&out.join("summary.csv"), &summary)?;

    let epochs = TrainConfig::default().epochs;
    write_atomic(
        &out.join("curves.svg"),
        &curve_svg(&series, epochs.saturating_sub(1) as f64),
    )?;
    write_samples(out, seeds[0].dataset)?;

    for s in &summaries {
        println!(
            "{}: mean final accuracy {:.3}, reached 100% in {:.0}/{}, above chance {:.0}/{}, {} parameters",
            s.model,
            s.mean_final_accuracy,
            s.fraction_reached_full * s.iterations as f64,
            s.iterations,
            s.fraction_above_chance * s.iterations as f64,
            s.iterations,
            s.parameters
        );
    }
    println!("wrote curves.csv, summary.csv, curves.svg, samples/ to {}", out.display());
    Ok(ExperimentOutput {
        summaries,
        curve_rows,
    })
}
