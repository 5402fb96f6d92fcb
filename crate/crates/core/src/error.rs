use thiserror::Error;

/// Errors produced by grid, kernel and convolution operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HexError {
    #[error("invalid grid: rows={rows}, cols={cols}, pitch={pitch} (need rows >= 1, cols >= 1, pitch > 0)")]
    InvalidGrid { rows: usize, cols: usize, pitch: f64 },

    #[error("coordinate (row {row}, col {col}) outside grid of {rows} rows x {cols} cols")]
    OutOfBounds {
        row: i64,
        col: i64,
        rows: usize,
        cols: usize,
    },

    #[error("value buffer holds {got} entries, expected {expected}")]
    ValueCount { expected: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("kernel expects {expected} input channels, tensor has {got}")]
    ChannelMismatch { expected: usize, got: usize },

    #[error("kernel weight buffer holds {got} values, expected {expected}")]
    WeightCount { expected: usize, got: usize },

    #[error("bias buffer holds {got} values, expected {expected}")]
    BiasCount { expected: usize, got: usize },

    #[error("stride must be >= 1")]
    ZeroStride,

    #[error("no valid kernel centers: grid of {rows} rows x {cols} cols too small for stride {stride}")]
    EmptyLattice {
        rows: usize,
        cols: usize,
        stride: usize,
    },

    #[error("pooling window size must be >= 1")]
    ZeroPoolSize,

    #[error("depth kernel must be odd, got {kd}")]
    EvenDepthKernel { kd: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}
