//! The three fixed experiment architectures.
//!
//! All three share the head shape `flatten -> dense -> relu -> dense -> relu
//! -> dense(4)` and differ only in the sampling lattice of their conv/pool
//! front end. The two small models are parameter-matched twins on 16x16
//! inputs (hexagonal vs square); the large square model works on the 32x32
//! resampled copies of the same scenes and spends roughly a hundred times
//! more parameters to do it.

use crate::model::{LayerSpec, ModelConfig};

/// Classes predicted by every experiment model.
pub const CLASSES: usize = 4;

/// Side length of the small (hex and square) input grids.
pub const SMALL_SIDE: usize = 16;

/// Side length of the large square input grid.
pub const LARGE_SIDE: usize = 32;

/// Hexagonal small model: 12,340 parameters on a 16x16 hex grid.
pub fn h_small(seed: u64) -> ModelConfig {
    ModelConfig {
        name: "h-small".into(),
        seed,
        layers: vec![
            LayerSpec::HexConv {
                n: 1,
                in_ch: 1,
                out_ch: 8,
                stride: 1,
            },
            LayerSpec::Relu,
            LayerSpec::HexMaxPool { n: 1, stride: 2 },
            LayerSpec::HexConv {
                n: 1,
                in_ch: 8,
                out_ch: 16,
                stride: 1,
            },
            LayerSpec::Relu,
            LayerSpec::HexMaxPool { n: 1, stride: 2 },
            LayerSpec::Flatten,
            LayerSpec::Dense { nin: 256, nout: 40 },
            LayerSpec::Relu,
            LayerSpec::Dense { nin: 40, nout: 24 },
            LayerSpec::Relu,
            LayerSpec::Dense {
                nin: 24,
                nout: CLASSES,
            },
        ],
    }
}

/// Square twin of [`h_small`]: 12,612 parameters on a 16x16 raster.
pub fn s_small(seed: u64) -> ModelConfig {
    ModelConfig {
        name: "s-small".into(),
        seed,
        layers: vec![
            LayerSpec::SquareConv {
                k: 3,
                in_ch: 1,
                out_ch: 8,
                stride: 1,
            },
            LayerSpec::Relu,
            LayerSpec::SquareMaxPool { k: 2, stride: 2 },
            LayerSpec::SquareConv {
                k: 3,
                in_ch: 8,
                out_ch: 16,
                stride: 1,
            },
            LayerSpec::Relu,
            LayerSpec::SquareMaxPool { k: 2, stride: 2 },
            LayerSpec::Flatten,
            LayerSpec::Dense { nin: 256, nout: 40 },
            LayerSpec::Relu,
            LayerSpec::Dense { nin: 40, nout: 24 },
            LayerSpec::Relu,
            LayerSpec::Dense {
                nin: 24,
                nout: CLASSES,
            },
        ],
    }
}

/// Large square model: 1,184,692 parameters on the 32x32 resampled raster.
pub fn s_large(seed: u64) -> ModelConfig {
    ModelConfig {
        name: "s-large".into(),
        seed,
        layers: vec![
            LayerSpec::SquareConv {
                k: 3,
                in_ch: 1,
                out_ch: 4,
                stride: 1,
            },
            LayerSpec::Relu,
            LayerSpec::SquareMaxPool { k: 2, stride: 2 },
            LayerSpec::SquareConv {
                k: 3,
                in_ch: 4,
                out_ch: 8,
                stride: 1,
            },
            LayerSpec::Relu,
            LayerSpec::SquareMaxPool { k: 2, stride: 2 },
            LayerSpec::SquareConv {
                k: 3,
                in_ch: 8,
                out_ch: 32,
                stride: 1,
            },
            LayerSpec::Relu,
            LayerSpec::SquareMaxPool { k: 2, stride: 2 },
            LayerSpec::Flatten,
            LayerSpec::Dense {
                nin: 512,
                nout: 2048,
            },
            LayerSpec::Relu,
            LayerSpec::Dense { nin: 2048, nout: 64 },
            LayerSpec::Relu,
            LayerSpec::Dense {
                nin: 64,
                nout: CLASSES,
            },
        ],
    }
}
