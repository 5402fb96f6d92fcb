//! Synthetic classification data for the hex-vs-square comparison: four
//! 6-fold-symmetric hexagonal shapes stamped at random positions on a hex
//! grid, noised once, then interpolated onto square rasters of matched and
//! quadrupled pixel count. All three views of an image share the same noise
//! realization, so a model comparison measures representation, not luck.

mod error;
pub mod image;
pub mod resample;
pub mod shapes;

pub use error::DataError;
pub use image::{build_dataset, make_image, Dataset, DatasetConfig};
pub use resample::{resample_to_square, ResamplePlan};
pub use shapes::ShapeClass;
