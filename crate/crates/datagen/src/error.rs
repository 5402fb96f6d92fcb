use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("no class with id {0}")]
    UnknownClass(usize),
    #[error("shape of class {class} fits nowhere on a {rows}x{cols} grid")]
    NoValidPosition {
        class: usize,
        rows: usize,
        cols: usize,
    },
    #[error("noise sigma must be finite and non-negative, got {0}")]
    BadSigma(f64),
    #[error("resample factor must be 1 or 2, got {0}")]
    BadFactor(u32),
    #[error("hex grid bounding box is degenerate ({rows}x{cols})")]
    DegenerateBounds { rows: usize, cols: usize },
    #[error("expected single-channel images, got {0} channels")]
    MultiChannel(usize),
    #[error(transparent)]
    Hex(#[from] hexgrid_core::HexError),
}
