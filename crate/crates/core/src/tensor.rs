//! Dense batched tensors over hexagonal grids.

use crate::coords::{GridSpec, OffsetCoord};
use crate::error::HexError;

/// Aggregation rule for pooling windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolMode {
    Max,
    Avg,
}

/// Batched multi-channel values on an offset-addressed hexagonal grid.
///
/// Storage is dense row-major `(batch, channel, row, col)`. Cells with no
/// physical counterpart are ordinary data; fill them with whatever value
/// the application wants (conventionally 0).
#[derive(Debug, Clone, PartialEq)]
pub struct HexTensor {
    batch: usize,
    channels: usize,
    grid: GridSpec,
    values: Vec<f64>,
}

impl HexTensor {
    pub fn zeros(batch: usize, channels: usize, grid: GridSpec) -> Self {
        let len = batch * channels * grid.len();
        HexTensor {
            batch,
            channels,
            grid,
            values: vec![0.0; len],
        }
    }

    /// Wraps an existing value buffer. The length must match the shape and
    /// every entry must be finite.
    pub fn from_values(
        batch: usize,
        channels: usize,
        grid: GridSpec,
        values: Vec<f64>,
    ) -> Result<Self, HexError> {
        let expected = batch * channels * grid.len();
        if values.len() != expected {
            return Err(HexError::ValueCount {
                expected,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(HexError::NonFinite { index });
        }
        Ok(HexTensor {
            batch,
            channels,
            grid,
            values,
        })
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rows(&self) -> usize {
        self.grid.rows as usize
    }

    pub fn cols(&self) -> usize {
        self.grid.cols as usize
    }

    #[inline]
    fn idx(&self, b: usize, c: usize, row: usize, col: usize) -> usize {
        debug_assert!(b < self.batch && c < self.channels);
        debug_assert!(row < self.rows() && col < self.cols());
        ((b * self.channels + c) * self.rows() + row) * self.cols() + col
    }

    #[inline]
    pub fn get(&self, b: usize, c: usize, p: OffsetCoord) -> f64 {
        self.values[self.idx(b, c, p.row as usize, p.col as usize)]
    }

    #[inline]
    pub fn set(&mut self, b: usize, c: usize, p: OffsetCoord, v: f64) {
        let i = self.idx(b, c, p.row as usize, p.col as usize);
        self.values[i] = v;
    }

    /// One `(rows × cols)` image plane.
    pub fn plane(&self, b: usize, c: usize) -> &[f64] {
        let len = self.grid.len();
        let start = (b * self.channels + c) * len;
        &self.values[start..start + len]
    }

    pub fn plane_mut(&mut self, b: usize, c: usize) -> &mut [f64] {
        let len = self.grid.len();
        let start = (b * self.channels + c) * len;
        &mut self.values[start..start + len]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_shape(&self, other: &HexTensor) -> bool {
        self.batch == other.batch
            && self.channels == other.channels
            && self.grid.rows == other.grid.rows
            && self.grid.cols == other.grid.cols
    }
}

/// Batched multi-channel values on an ordinary square raster, stored
/// row-major `(batch, channel, row, col)`. The square counterpart of
/// [`HexTensor`], used for resampled data and rectangular layers; it has no
/// parity and no grid geometry beyond its dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareTensor {
    batch: usize,
    channels: usize,
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl SquareTensor {
    pub fn zeros(batch: usize, channels: usize, rows: usize, cols: usize) -> Self {
        SquareTensor {
            batch,
            channels,
            rows,
            cols,
            values: vec![0.0; batch * channels * rows * cols],
        }
    }

    /// Wraps an existing value buffer. The length must match the shape and
    /// every entry must be finite.
    pub fn from_values(
        batch: usize,
        channels: usize,
        rows: usize,
        cols: usize,
        values: Vec<f64>,
    ) -> Result<Self, HexError> {
        let expected = batch * channels * rows * cols;
        if values.len() != expected {
            return Err(HexError::ValueCount {
                expected,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(HexError::NonFinite { index });
        }
        Ok(SquareTensor {
            batch,
            channels,
            rows,
            cols,
            values,
        })
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, b: usize, c: usize, r: usize, col: usize) -> f64 {
        self.plane(b, c)[r * self.cols + col]
    }

    pub fn set(&mut self, b: usize, c: usize, r: usize, col: usize, v: f64) {
        let cols = self.cols;
        self.plane_mut(b, c)[r * cols + col] = v;
    }

    pub fn plane(&self, b: usize, c: usize) -> &[f64] {
        let cells = self.rows * self.cols;
        let start = (b * self.channels + c) * cells;
        &self.values[start..start + cells]
    }

    pub fn plane_mut(&mut self, b: usize, c: usize) -> &mut [f64] {
        let cells = self.rows * self.cols;
        let start = (b * self.channels + c) * cells;
        &mut self.values[start..start + cells]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn same_shape(&self, other: &SquareTensor) -> bool {
        self.batch == other.batch
            && self.channels == other.channels
            && self.rows == other.rows
            && self.cols == other.cols
    }
}

/// Batched multi-channel values on a stack of equidistant hexagonal planes,
/// stored `(batch, channel, depth, row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HexVolume {
    batch: usize,
    channels: usize,
    depth: usize,
    grid: GridSpec,
    values: Vec<f64>,
}

impl HexVolume {
    pub fn zeros(batch: usize, channels: usize, depth: usize, grid: GridSpec) -> Self {
        let len = batch * channels * depth * grid.len();
        HexVolume {
            batch,
            channels,
            depth,
            grid,
            values: vec![0.0; len],
        }
    }

    pub fn from_values(
        batch: usize,
        channels: usize,
        depth: usize,
        grid: GridSpec,
        values: Vec<f64>,
    ) -> Result<Self, HexError> {
        let expected = batch * channels * depth * grid.len();
        if values.len() != expected {
            return Err(HexError::ValueCount {
                expected,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(HexError::NonFinite { index });
        }
        Ok(HexVolume {
            batch,
            channels,
            depth,
            grid,
            values,
        })
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn get(&self, b: usize, c: usize, z: usize, p: OffsetCoord) -> f64 {
        let len = self.grid.len();
        let plane = ((b * self.channels + c) * self.depth + z) * len;
        self.values[plane + p.row as usize * self.grid.cols as usize + p.col as usize]
    }

    /// One depth slice across all batches and channels (copied).
    pub fn tensor_at_depth(&self, z: usize) -> HexTensor {
        let len = self.grid.len();
        let mut values = Vec::with_capacity(self.batch * self.channels * len);
        for b in 0..self.batch {
            for c in 0..self.channels {
                values.extend_from_slice(self.plane(b, c, z));
            }
        }
        HexTensor {
            batch: self.batch,
            channels: self.channels,
            grid: self.grid,
            values,
        }
    }

    /// One depth slice as a single-channel tensor view (copied).
    pub fn slice_tensor(&self, b: usize, c: usize, z: usize) -> HexTensor {
        let len = self.grid.len();
        let start = ((b * self.channels + c) * self.depth + z) * len;
        HexTensor {
            batch: 1,
            channels: 1,
            grid: self.grid,
            values: self.values[start..start + len].to_vec(),
        }
    }

    pub fn plane(&self, b: usize, c: usize, z: usize) -> &[f64] {
        let len = self.grid.len();
        let start = ((b * self.channels + c) * self.depth + z) * len;
        &self.values[start..start + len]
    }

    pub fn plane_mut(&mut self, b: usize, c: usize, z: usize) -> &mut [f64] {
        let len = self.grid.len();
        let start = ((b * self.channels + c) * self.depth + z) * len;
        &mut self.values[start..start + len]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}
