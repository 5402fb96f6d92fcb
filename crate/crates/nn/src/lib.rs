//! A deliberately small CNN training stack built on `hexgrid-core`.
//!
//! The crate exists to compare hexagonal convolution/pooling against their
//! square counterparts on equal footing: identical dense heads, identical
//! initialization scheme, identical optimizer. Everything is plain `f64`,
//! single-threaded, and fully seeded, so a (architecture, seed) pair pins the
//! entire training trajectory bit for bit.
//!
//! Layers are a closed enum rather than a trait object: the set of layer
//! kinds is fixed by the experiment, and a closed enum keeps parameters,
//! gradients and optimizer state trivially alignable.

pub mod act;
pub mod arch;
mod error;
pub mod gradcheck;
pub mod layers;
pub mod loss;
pub mod model;
pub mod optim;
pub mod square;
pub mod train;

pub use act::{Act, Matrix, SquareTensor};
pub use arch::{h_small, s_large, s_small};
pub use error::NnError;
pub use layers::Layer;
pub use model::{init_model, parameter_count, LayerSpec, Model, ModelConfig};
pub use train::{train, EpochStat, TrainConfig, TrainResult};
