use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("value count mismatch: expected {expected}, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("batch of {batch} inputs but {labels} labels")]
    LabelCount { batch: usize, labels: usize },
    #[error("empty batch")]
    EmptyBatch,
    #[error("square kernel size must be odd, got {k}")]
    EvenSquareKernel { k: usize },
    #[error("stride must be positive")]
    ZeroStride,
    #[error(transparent)]
    Hex(#[from] hexgrid_core::HexError),
}
