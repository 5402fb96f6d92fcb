//! Geometry of hexagonal kernels on the offset-addressed grid.
//!
//! A kernel of size `n` covers the central pixel plus `n` layers of
//! neighbors, 3n² + 3n + 1 elements in total. The canonical element order
//! is column-major: columns left to right (horizontal offset `dc` from -n
//! to +n), elements top to bottom within a column. Every weight vector,
//! file format and sub-kernel decomposition in this crate uses that order.

use crate::coords::{GridSpec, OffsetCoord};

/// One kernel element: horizontal column offset from the center and the
/// vertical index within that column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutElement {
    pub dc: i64,
    pub slot: i64,
}

/// Element addressing for a size-`n` hexagonal kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelLayout {
    pub size: u32,
}

impl KernelLayout {
    pub fn new(size: u32) -> Self {
        KernelLayout { size }
    }

    /// 3n² + 3n + 1.
    pub fn element_count(&self) -> usize {
        let n = self.size as usize;
        3 * n * n + 3 * n + 1
    }

    /// Number of elements in the column at horizontal offset `dc`: 2n+1-|dc|.
    pub fn column_height(&self, dc: i64) -> usize {
        let n = self.size as i64;
        debug_assert!(dc.abs() <= n);
        (2 * n + 1 - dc.abs()) as usize
    }

    /// Elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = LayoutElement> {
        let n = self.size as i64;
        (-n..=n).flat_map(move |dc| {
            (0..(2 * n + 1 - dc.abs())).map(move |slot| LayoutElement { dc, slot })
        })
    }

    /// Flat index of the first element of the column at offset `dc`.
    pub fn column_start(&self, dc: i64) -> usize {
        let n = self.size as i64;
        debug_assert!(dc.abs() <= n);
        (-n..dc).map(|d| (2 * n + 1 - d.abs()) as usize).sum()
    }

    /// Row of the topmost element of kernel column `dc` relative to the
    /// center row, for a center in a column of the given parity (0 even,
    /// 1 odd). The half-pitch column shift of the addressing scheme makes
    /// this the single place where parity enters kernel geometry.
    pub fn column_top_offset(&self, dc: i64, col_parity: i64) -> i64 {
        debug_assert!(col_parity == 0 || col_parity == 1);
        -(self.size as i64) + (dc.abs() + col_parity) / 2
    }

    /// Absolute tensor position of a kernel element for a given center.
    /// The result may lie outside any particular grid.
    pub fn element_position(&self, center: OffsetCoord, el: LayoutElement) -> OffsetCoord {
        let top = self.column_top_offset(el.dc, center.col.rem_euclid(2));
        OffsetCoord {
            row: center.row + top + el.slot,
            col: center.col + el.dc,
        }
    }

    /// Axial displacement of each element from the kernel center, in
    /// canonical order. Independent of the center's column parity.
    pub fn element_axial_offsets(&self) -> Vec<(i64, i64)> {
        let n = self.size as i64;
        let mut out = Vec::with_capacity(self.element_count());
        for dq in -n..=n {
            let dr_min = (-n).max(-dq - n);
            let dr_max = n.min(-dq + n);
            for dr in dr_min..=dr_max {
                out.push((dq, dr));
            }
        }
        out
    }
}

/// All in-grid pixels within hex distance `n` of `center`, in canonical
/// kernel element order. Off-grid cells are simply omitted, so centers
/// near the boundary return fewer pixels.
pub fn neighborhood(center: OffsetCoord, n: u32, grid: &GridSpec) -> Vec<OffsetCoord> {
    let layout = KernelLayout::new(n);
    layout
        .elements()
        .map(|el| layout.element_position(center, el))
        .filter(|p| grid.contains(*p))
        .collect()
}
