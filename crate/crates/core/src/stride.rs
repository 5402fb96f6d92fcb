//! Valid kernel-center lattices for strided operations.
//!
//! A stride of `s` keeps centers generated from the top-left pixel by `s`
//! steps straight down and `s` steps along the down-right diagonal. In
//! tensor terms every s-th column survives, and within output column `C`
//! the rows `anchor + s·R` survive with a parity-dependent top-row anchor.
//! Columns that would come out shorter than the rest are truncated to the
//! common length, and columns with no valid center at all are dropped.

use crate::coords::{GridSpec, OffsetCoord};
use crate::error::HexError;

/// Top-row residue of output column `C` under stride `s`.
///
/// Walking s·C down-right diagonal steps from the origin descends one row
/// per odd column crossed, landing ⌊s·C/2⌋ rows down; reducing mod s gives
/// the topmost in-grid row of that column's center class.
pub fn anchor(stride: usize, c: usize) -> usize {
    (stride * c / 2) % stride
}

/// The set of valid kernel-center positions for one grid and stride.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrideLattice {
    stride: usize,
    out_rows: usize,
    /// Candidate output-column indices that kept at least one center,
    /// ascending. Candidate C covers input column s·C.
    kept: Vec<usize>,
}

/// Builds the center lattice, dropping empty columns and truncating the
/// rest to a common length.
pub fn strided_lattice(g: &GridSpec, stride: usize) -> Result<StrideLattice, HexError> {
    if stride == 0 {
        return Err(HexError::ZeroStride);
    }
    let candidates = (g.cols - 1) / stride + 1;
    let mut kept = Vec::with_capacity(candidates);
    let mut out_rows = usize::MAX;
    for c in 0..candidates {
        let a = anchor(stride, c);
        if a < g.rows {
            kept.push(c);
            out_rows = out_rows.min((g.rows - 1 - a) / stride + 1);
        }
    }
    if kept.is_empty() {
        return Err(HexError::EmptyLattice {
            rows: g.rows,
            cols: g.cols,
            stride,
        });
    }
    Ok(StrideLattice {
        stride,
        out_rows,
        kept,
    })
}

impl StrideLattice {
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn out_rows(&self) -> usize {
        self.out_rows
    }

    pub fn out_cols(&self) -> usize {
        self.kept.len()
    }

    /// Candidate index of output column `oc` (equals `oc` unless columns
    /// were dropped).
    pub fn candidate(&self, oc: usize) -> usize {
        self.kept[oc]
    }

    /// Input column covered by output column `oc`.
    pub fn input_col(&self, oc: usize) -> usize {
        self.stride * self.kept[oc]
    }

    /// Top-row anchor of output column `oc`.
    pub fn anchor_of(&self, oc: usize) -> usize {
        anchor(self.stride, self.kept[oc])
    }

    /// Input pixel acting as the kernel center for output element (r, oc).
    pub fn center(&self, r: usize, oc: usize) -> OffsetCoord {
        debug_assert!(r < self.out_rows && oc < self.kept.len());
        OffsetCoord {
            row: (self.anchor_of(oc) + self.stride * r) as i64,
            col: self.input_col(oc) as i64,
        }
    }

    /// The output grid. When no column was dropped the centers form a
    /// hexagonal grid of their own with the pitch scaled by the stride;
    /// with dropped columns (single-row grids under stride ≥ 2) only the
    /// tensor shape is meaningful.
    pub fn output_grid(&self, input: &GridSpec) -> GridSpec {
        GridSpec {
            rows: self.out_rows,
            cols: self.kept.len(),
            pitch: self.stride as f64 * input.pitch,
        }
    }

    pub fn centers(&self) -> impl Iterator<Item = (usize, usize, OffsetCoord)> + '_ {
        (0..self.out_rows).flat_map(move |r| {
            (0..self.kept.len()).map(move |c| (r, c, self.center(r, c)))
        })
    }
}
