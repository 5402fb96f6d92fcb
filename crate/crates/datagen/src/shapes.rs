//! The four shape classes: rings and discs of the hexagonal lattice.
//!
//! A ring of radius `k` is the set of cells at hex distance exactly `k`
//! from the center; a disc collects everything up to `k`. All four shapes
//! are 6-fold symmetric about their center and pairwise distinct as pixel
//! sets (their sizes 7, 12, 19, 6 already differ).

use hexgrid_core::{AxialCoord, GridSpec, OffsetCoord};

use crate::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeClass {
    /// Filled disc of radius 1: center plus its 6 neighbors (7 cells).
    DiscOne,
    /// Hollow ring at distance 2 (12 cells).
    RingTwo,
    /// Filled disc of radius 2 (19 cells).
    DiscTwo,
    /// Hollow ring at distance 1 (6 cells).
    RingOne,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 4] = [
        ShapeClass::DiscOne,
        ShapeClass::RingTwo,
        ShapeClass::DiscTwo,
        ShapeClass::RingOne,
    ];

    pub fn id(self) -> usize {
        match self {
            ShapeClass::DiscOne => 0,
            ShapeClass::RingTwo => 1,
            ShapeClass::DiscTwo => 2,
            ShapeClass::RingOne => 3,
        }
    }

    pub fn from_id(id: usize) -> Result<ShapeClass, DataError> {
        Self::ALL
            .get(id)
            .copied()
            .ok_or(DataError::UnknownClass(id))
    }

    /// Hex distances that belong to the shape.
    fn keeps(self, d: u64) -> bool {
        match self {
            ShapeClass::DiscOne => d <= 1,
            ShapeClass::RingTwo => d == 2,
            ShapeClass::DiscTwo => d <= 2,
            ShapeClass::RingOne => d == 1,
        }
    }

    fn radius(self) -> i64 {
        match self {
            ShapeClass::DiscOne | ShapeClass::RingOne => 1,
            ShapeClass::RingTwo | ShapeClass::DiscTwo => 2,
        }
    }

    /// Axial offsets `(dq, dr)` of the shape cells relative to its center,
    /// in a fixed scan order.
    pub fn offsets(self) -> Vec<(i64, i64)> {
        let n = self.radius();
        let origin = AxialCoord::new(0, 0);
        let mut out = Vec::new();
        for dq in -n..=n {
            for dr in (-n).max(-dq - n)..=n.min(-dq + n) {
                if self.keeps(origin.distance(AxialCoord::new(dq, dr))) {
                    out.push((dq, dr));
                }
            }
        }
        out
    }

    /// The shape's cells for a given center, in offset coordinates.
    /// Callers must ensure the result is in-grid if that matters.
    pub fn cells(self, center: OffsetCoord) -> Vec<OffsetCoord> {
        let ca = center.to_axial();
        self.offsets()
            .into_iter()
            .map(|(dq, dr)| ca.offset_by(dq, dr).to_offset())
            .collect()
    }

    /// Centers where the whole shape lies in-grid, in row-major order.
    pub fn valid_centers(self, grid: &GridSpec) -> Vec<OffsetCoord> {
        grid.iter()
            .filter(|&c| self.cells(c).iter().all(|&p| grid.contains(p)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn pixel_counts_are_7_12_19_6() {
        let counts: Vec<usize> = ShapeClass::ALL.iter().map(|s| s.offsets().len()).collect();
        assert_eq!(counts, vec![7, 12, 19, 6]);
    }

    #[test]
    fn ids_round_trip() {
        for class in ShapeClass::ALL {
            assert_eq!(ShapeClass::from_id(class.id()).unwrap(), class);
        }
        assert!(matches!(
            ShapeClass::from_id(4),
            Err(DataError::UnknownClass(4))
        ));
    }

    #[test]
    fn classes_are_pairwise_distinct_for_a_common_center() {
        let center = OffsetCoord::new(5, 5);
        let sets: Vec<HashSet<OffsetCoord>> = ShapeClass::ALL
            .iter()
            .map(|s| s.cells(center).into_iter().collect())
            .collect();
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(sets[i], sets[j], "classes {i} and {j} coincide");
            }
        }
    }

    #[test]
    fn every_shape_is_rotate60_invariant() {
        let origin = AxialCoord::new(0, 0);
        for class in ShapeClass::ALL {
            let set: HashSet<(i64, i64)> = class.offsets().into_iter().collect();
            for &(dq, dr) in &class.offsets() {
                let rot = AxialCoord::new(dq, dr).rotate60_about(origin);
                assert!(
                    set.contains(&(rot.q, rot.r)),
                    "{class:?}: ({dq},{dr}) rotates out of the shape"
                );
            }
        }
    }

    #[test]
    fn disc_one_is_ring_one_plus_center() {
        let mut ring: Vec<(i64, i64)> = ShapeClass::RingOne.offsets();
        ring.push((0, 0));
        ring.sort_unstable();
        let mut disc = ShapeClass::DiscOne.offsets();
        disc.sort_unstable();
        assert_eq!(ring, disc);
    }

    #[test]
    fn valid_centers_keep_shapes_in_grid() {
        let grid = GridSpec::new(6, 7).unwrap();
        for class in ShapeClass::ALL {
            let centers = class.valid_centers(&grid);
            assert!(!centers.is_empty());
            for c in centers {
                assert!(class.cells(c).iter().all(|&p| grid.contains(p)));
            }
        }
    }

    #[test]
    fn radius_one_centers_exclude_the_border() {
        let grid = GridSpec::new(5, 5).unwrap();
        let centers = ShapeClass::DiscOne.valid_centers(&grid);
        // border rows are never valid; border columns depend on parity
        assert!(centers.iter().all(|c| c.row >= 1 && c.row <= 3));
        assert!(!centers.contains(&OffsetCoord::new(0, 2)));
        assert!(centers.contains(&OffsetCoord::new(2, 2)));
    }
}
