//! Image synthesis and full dataset assembly.

use hexgrid_core::{GridSpec, HexTensor, SquareTensor};
use rand::{Rng, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};

use crate::resample::ResamplePlan;
use crate::shapes::ShapeClass;
use crate::DataError;

#[derive(Debug, Clone)]
pub struct DatasetConfig {
    pub grid: GridSpec,
    pub classes: Vec<ShapeClass>,
    /// Gaussian noise level relative to the unit shape amplitude.
    pub noise_sigma: f64,
    pub seed: u64,
    pub images_per_class: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            grid: GridSpec::new(16, 16).expect("16x16 is a valid grid"),
            classes: ShapeClass::ALL.to_vec(),
            noise_sigma: 0.3,
            seed: 7,
            images_per_class: 128,
        }
    }
}

/// Stamps one shape at a uniformly drawn valid center and adds independent
/// Gaussian noise to every cell. Returns the image and its label.
pub fn make_image(
    class: ShapeClass,
    rng: &mut impl Rng,
    cfg: &DatasetConfig,
) -> Result<(HexTensor, usize), DataError> {
    if !(cfg.noise_sigma >= 0.0 && cfg.noise_sigma.is_finite()) {
        return Err(DataError::BadSigma(cfg.noise_sigma));
    }
    let centers = class.valid_centers(&cfg.grid);
    if centers.is_empty() {
        return Err(DataError::NoValidPosition {
            class: class.id(),
            rows: cfg.grid.rows,
            cols: cfg.grid.cols,
        });
    }
    let center = centers[rng.gen_range(0..centers.len())];
    let mut img = HexTensor::zeros(1, 1, cfg.grid);
    for p in class.cells(center) {
        img.set(0, 0, p, 1.0);
    }
    if cfg.noise_sigma > 0.0 {
        let noise = Normal::new(0.0, cfg.noise_sigma).expect("sigma checked above");
        for v in img.values_mut() {
            *v += noise.sample(rng);
        }
    }
    Ok((img, class.id()))
}

/// The three pixel-aligned views of one generated image set.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// Native view: `images x 1 x grid`.
    pub hex: HexTensor,
    /// Same images interpolated to a matched-count square raster.
    pub square_small: SquareTensor,
    /// Same images interpolated to the quadrupled square raster.
    pub square_large: SquareTensor,
    pub labels: Vec<usize>,
}

/// Generates `images_per_class` images per class (interleaved labels
/// 0,1,2,3,0,...), noises each once on the hex grid, and resamples the same
/// noisy images to both square rasters.
///
/// Each image draws from its own ChaCha8 stream (`seed`, stream = image
/// index), so generation could run in any order or in parallel without
/// changing a single bit of the output.
pub fn build_dataset(cfg: &DatasetConfig) -> Result<Dataset, DataError> {
    let n = cfg.images_per_class * cfg.classes.len();
    let cells = cfg.grid.len();
    let mut values = Vec::with_capacity(n * cells);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = cfg.classes[i % cfg.classes.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let (img, label) = make_image(class, &mut rng, cfg)?;
        values.extend_from_slice(img.values());
        labels.push(label);
    }
    let hex = HexTensor::from_values(n, 1, cfg.grid, values)?;
    let square_small = ResamplePlan::new(&cfg.grid, 1)?.apply(&hex)?;
    let square_large = ResamplePlan::new(&cfg.grid, 2)?.apply(&hex)?;
    Ok(Dataset {
        hex,
        square_small,
        square_large,
        labels,
    })
}
