//! Activation containers flowing between layers.
//!
//! Three shapes cover the whole stack: hex feature maps (reusing
//! [`HexTensor`]), square feature maps, and flat per-sample feature rows.

use hexgrid_core::{GridSpec, HexTensor};
pub use hexgrid_core::SquareTensor;

use crate::NnError;

/// Row-major `rows x cols` matrix. Rows index samples, columns features.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self, NnError> {
        if values.len() != rows * cols {
            return Err(NnError::ValueCount {
                expected: rows * cols,
                got: values.len(),
            });
        }
        Ok(Matrix { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.values[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// An activation as it flows through the network.
#[derive(Debug, Clone)]
pub enum Act {
    Hex(HexTensor),
    Square(SquareTensor),
    Flat(Matrix),
}

impl Act {
    /// Number of samples in the batch dimension.
    pub fn batch(&self) -> usize {
        match self {
            Act::Hex(t) => t.batch(),
            Act::Square(t) => t.batch(),
            Act::Flat(m) => m.rows(),
        }
    }

    /// Features per sample (channels times cells for feature maps).
    pub fn features_per_sample(&self) -> usize {
        match self {
            Act::Hex(t) => t.channels() * t.grid().len(),
            Act::Square(t) => t.channels() * t.rows() * t.cols(),
            Act::Flat(m) => m.cols(),
        }
    }

    /// Short human-readable shape tag for error messages.
    pub fn shape_tag(&self) -> String {
        match self {
            Act::Hex(t) => format!("hex[{}x{}x{}x{}]", t.batch(), t.channels(), t.rows(), t.cols()),
            Act::Square(t) => format!(
                "square[{}x{}x{}x{}]",
                t.batch(),
                t.channels(),
                t.rows(),
                t.cols()
            ),
            Act::Flat(m) => format!("flat[{}x{}]", m.rows(), m.cols()),
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            Act::Hex(t) => t.values(),
            Act::Square(t) => t.values(),
            Act::Flat(m) => m.values(),
        }
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        match self {
            Act::Hex(t) => t.values_mut(),
            Act::Square(t) => t.values_mut(),
            Act::Flat(m) => m.values_mut(),
        }
    }

    /// Zero-filled activation of the same shape.
    pub fn zeros_like(&self) -> Act {
        match self {
            Act::Hex(t) => Act::Hex(HexTensor::zeros(t.batch(), t.channels(), *t.grid())),
            Act::Square(t) => Act::Square(SquareTensor::zeros(
                t.batch(),
                t.channels(),
                t.rows(),
                t.cols(),
            )),
            Act::Flat(m) => Act::Flat(Matrix::zeros(m.rows(), m.cols())),
        }
    }

    /// New activation containing the selected samples, in `idx` order.
    /// Indices may repeat.
    pub fn gather(&self, idx: &[usize]) -> Act {
        let per = self.features_per_sample();
        let src = self.values();
        let mut out = vec![0.0; idx.len() * per];
        for (slot, &i) in idx.iter().enumerate() {
            out[slot * per..(slot + 1) * per].copy_from_slice(&src[i * per..(i + 1) * per]);
        }
        match self {
            Act::Hex(t) => Act::Hex(
                HexTensor::from_values(idx.len(), t.channels(), *t.grid(), out)
                    .expect("gather preserves per-sample layout"),
            ),
            Act::Square(t) => Act::Square(
                SquareTensor::from_values(idx.len(), t.channels(), t.rows(), t.cols(), out)
                    .expect("gather preserves per-sample layout"),
            ),
            Act::Flat(m) => Act::Flat(
                Matrix::from_values(idx.len(), m.cols(), out)
                    .expect("gather preserves per-sample layout"),
            ),
        }
    }
}

/// Convenience constructor used in tests and the data pipeline: a hex
/// activation from raw values over a unit-pitch grid.
pub fn hex_act(
    batch: usize,
    channels: usize,
    rows: usize,
    cols: usize,
    values: Vec<f64>,
) -> Result<Act, NnError> {
    let grid = GridSpec::new(rows, cols)?;
    Ok(Act::Hex(HexTensor::from_values(batch, channels, grid, values)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trips_values() {
        let m = Matrix::from_values(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.get(0, 2), 3.0);
        assert_eq!(m.get(1, 0), 4.0);
        assert_eq!(m.row(1), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn matrix_rejects_wrong_count() {
        assert!(matches!(
            Matrix::from_values(2, 2, vec![1.0]),
            Err(NnError::ValueCount { expected: 4, got: 1 })
        ));
    }

    #[test]
    fn gather_selects_and_repeats_samples() {
        let m = Matrix::from_values(3, 2, vec![0.0, 1.0, 10.0, 11.0, 20.0, 21.0]).unwrap();
        let g = Act::Flat(m).gather(&[2, 0, 2]);
        assert_eq!(g.values(), &[20.0, 21.0, 0.0, 1.0, 20.0, 21.0]);
        assert_eq!(g.batch(), 3);
    }

    #[test]
    fn gather_hex_keeps_grid() {
        let a = hex_act(2, 1, 2, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        let g = a.gather(&[1]);
        match &g {
            Act::Hex(t) => {
                assert_eq!(t.batch(), 1);
                assert_eq!(t.values(), &[5.0, 6.0, 7.0, 8.0]);
            }
            _ => panic!("expected hex activation"),
        }
    }

    #[test]
    fn features_per_sample_counts_cells() {
        let a = hex_act(1, 2, 3, 4, vec![0.0; 24]).unwrap();
        assert_eq!(a.features_per_sample(), 24);
        let s = Act::Square(SquareTensor::zeros(2, 3, 4, 5));
        assert_eq!(s.features_per_sample(), 60);
    }
}
