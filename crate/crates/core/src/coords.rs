//! Coordinate systems for the offset-addressed hexagonal grid.
//!
//! Offset coordinates index the rectangular tensor: rows count top to
//! bottom, columns left to right. The parity convention is fixed globally:
//! an odd-indexed column sits half a pitch lower in physical space than
//! its even neighbors and was shifted up into row alignment when the data
//! was packed into tensor form.
//!
//! Axial coordinates (q along the column axis, r along the down diagonal)
//! give an unambiguous frame for exact lattice arithmetic; all reference
//! implementations gather neighbors through them.

use crate::error::HexError;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Dimensions and physical scale of a hexagonal grid in tensor form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    /// Physical distance between neighboring pixel centers.
    pub pitch: f64,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize) -> Result<Self, HexError> {
        Self::with_pitch(rows, cols, 1.0)
    }

    pub fn with_pitch(rows: usize, cols: usize, pitch: f64) -> Result<Self, HexError> {
        if rows == 0 || cols == 0 || !(pitch > 0.0) {
            return Err(HexError::InvalidGrid { rows, cols, pitch });
        }
        Ok(GridSpec { rows, cols, pitch })
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        false // rows >= 1 and cols >= 1 by construction
    }

    pub fn contains(&self, p: OffsetCoord) -> bool {
        p.row >= 0 && p.col >= 0 && (p.row as usize) < self.rows && (p.col as usize) < self.cols
    }

    /// Iterator over all in-grid coordinates, row-major.
    pub fn iter(&self) -> impl Iterator<Item = OffsetCoord> + '_ {
        let cols = self.cols as i64;
        (0..self.rows as i64)
            .flat_map(move |row| (0..cols).map(move |col| OffsetCoord { row, col }))
    }

    /// Physical Cartesian center of a pixel. x grows to the right, y grows
    /// upward, rows grow downward; odd columns sit half a pitch lower.
    pub fn pixel_center(&self, p: OffsetCoord) -> Result<(f64, f64), HexError> {
        if !self.contains(p) {
            return Err(HexError::OutOfBounds {
                row: p.row,
                col: p.col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(lattice_point(p, self.pitch))
    }
}

/// Physical position of an arbitrary lattice point, without grid bounds.
pub(crate) fn lattice_point(p: OffsetCoord, pitch: f64) -> (f64, f64) {
    let x = p.col as f64 * (SQRT3 / 2.0) * pitch;
    let y = -(p.row as f64 + 0.5 * (p.col.rem_euclid(2)) as f64) * pitch;
    (x, y)
}

/// Tensor index of a pixel: row counted top to bottom, column left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OffsetCoord {
    pub row: i64,
    pub col: i64,
}

impl OffsetCoord {
    pub fn new(row: i64, col: i64) -> Self {
        OffsetCoord { row, col }
    }

    /// Convert to axial coordinates. Exact for any integers.
    pub fn to_axial(self) -> AxialCoord {
        AxialCoord {
            q: self.col,
            r: self.row - self.col.div_euclid(2),
        }
    }
}

/// Axial lattice coordinates: q along the column axis, r along the
/// straight-down axis of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AxialCoord {
    pub q: i64,
    pub r: i64,
}

impl AxialCoord {
    pub fn new(q: i64, r: i64) -> Self {
        AxialCoord { q, r }
    }

    /// Exact inverse of [`OffsetCoord::to_axial`].
    pub fn to_offset(self) -> OffsetCoord {
        OffsetCoord {
            row: self.r + self.q.div_euclid(2),
            col: self.q,
        }
    }

    pub fn offset_by(self, dq: i64, dr: i64) -> AxialCoord {
        AxialCoord {
            q: self.q + dq,
            r: self.r + dr,
        }
    }

    /// Hex graph distance between two lattice points.
    pub fn distance(self, other: AxialCoord) -> u64 {
        let dq = self.q - other.q;
        let dr = self.r - other.r;
        ((dq.abs() + dr.abs() + (dq + dr).abs()) / 2) as u64
    }

    /// Rotate by 60 degrees about `center`. Applying it six times is the
    /// identity; hex distance to `center` is preserved.
    pub fn rotate60_about(self, center: AxialCoord) -> AxialCoord {
        let dq = self.q - center.q;
        let dr = self.r - center.r;
        AxialCoord {
            q: center.q - dr,
            r: center.r + dq + dr,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashSet, VecDeque};

    #[test]
    fn origin_round_trips() {
        let p = OffsetCoord::new(0, 0);
        assert_eq!(p.to_axial(), AxialCoord::new(0, 0));
        assert_eq!(AxialCoord::new(0, 0).to_offset(), p);
    }

    #[test]
    fn known_conversions() {
        assert_eq!(OffsetCoord::new(2, 3).to_axial(), AxialCoord::new(3, 1));
        assert_eq!(OffsetCoord::new(1, 2).to_axial(), AxialCoord::new(2, 0));
        assert_eq!(AxialCoord::new(3, 1).to_offset(), OffsetCoord::new(2, 3));
        assert_eq!(AxialCoord::new(2, 0).to_offset(), OffsetCoord::new(1, 2));
    }

    #[test]
    fn round_trip_exhaustive_50x51() {
        let g = GridSpec::new(50, 51).unwrap();
        for p in g.iter() {
            assert_eq!(p.to_axial().to_offset(), p);
        }
    }

    #[test]
    fn round_trip_negative_coords() {
        for row in -7..7 {
            for col in -7..7 {
                let p = OffsetCoord::new(row, col);
                assert_eq!(p.to_axial().to_offset(), p);
            }
        }
    }

    #[test]
    fn pixel_centers() {
        let g = GridSpec::new(4, 4).unwrap();
        assert_eq!(g.pixel_center(OffsetCoord::new(0, 0)).unwrap(), (0.0, 0.0));
        let (x, y) = g.pixel_center(OffsetCoord::new(0, 1)).unwrap();
        assert!((x - SQRT3 / 2.0).abs() < 1e-15);
        assert!((y + 0.5).abs() < 1e-15);
        assert_eq!(g.pixel_center(OffsetCoord::new(1, 0)).unwrap(), (0.0, -1.0));
        assert!(g.pixel_center(OffsetCoord::new(4, 0)).is_err());
        assert!(g.pixel_center(OffsetCoord::new(0, -1)).is_err());
    }

    #[test]
    fn neighbor_pairs_sit_one_pitch_apart() {
        // distance 1 in the hex metric must coincide with physical distance
        // equal to the pitch, checked exhaustively on a 10x11 grid.
        let g = GridSpec::new(10, 11).unwrap();
        for a in g.iter() {
            let (ax, ay) = g.pixel_center(a).unwrap();
            for b in g.iter() {
                let (bx, by) = g.pixel_center(b).unwrap();
                let euclid = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
                let hex = a.to_axial().distance(b.to_axial());
                if hex == 1 {
                    assert!((euclid - 1.0).abs() < 1e-12, "{a:?} {b:?}");
                } else {
                    assert!(hex == 0 || (euclid - 1.0).abs() > 1e-6, "{a:?} {b:?}");
                }
            }
        }
    }

    /// Breadth-first search over physical neighbor pairs; the slow ground
    /// truth for the closed-form hex distance.
    fn bfs_distance(g: &GridSpec, from: OffsetCoord, to: OffsetCoord) -> u64 {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        queue.push_back((from, 0u64));
        seen.insert(from);
        while let Some((p, d)) = queue.pop_front() {
            if p == to {
                return d;
            }
            let (px, py) = g.pixel_center(p).unwrap();
            for q in g.iter() {
                if seen.contains(&q) {
                    continue;
                }
                let (qx, qy) = g.pixel_center(q).unwrap();
                let step = ((px - qx).powi(2) + (py - qy).powi(2)).sqrt();
                if (step - 1.0).abs() < 1e-9 {
                    seen.insert(q);
                    queue.push_back((q, d + 1));
                }
            }
        }
        unreachable!("grid is connected");
    }

    #[test]
    fn distance_matches_bfs() {
        let g = GridSpec::new(6, 7).unwrap();
        let center = OffsetCoord::new(2, 2);
        for p in g.iter() {
            let fast = center.to_axial().distance(p.to_axial());
            let slow = bfs_distance(&g, center, p);
            assert_eq!(fast, slow, "{p:?}");
        }
    }

    #[test]
    fn distance_examples() {
        let d = |a: (i64, i64), b: (i64, i64)| {
            OffsetCoord::new(a.0, a.1)
                .to_axial()
                .distance(OffsetCoord::new(b.0, b.1).to_axial())
        };
        assert_eq!(d((2, 2), (2, 2)), 0);
        assert_eq!(d((2, 2), (1, 3)), 1);
        assert_eq!(d((2, 2), (2, 4)), 2);
    }

    #[test]
    fn rotate60_fixed_point_and_order() {
        let c = AxialCoord::new(3, -1);
        assert_eq!(c.rotate60_about(c), c);
        let p = AxialCoord::new(7, 2);
        let mut q = p;
        for _ in 0..6 {
            q = q.rotate60_about(c);
        }
        assert_eq!(q, p);
        for step in 1..6 {
            let mut r = p;
            for _ in 0..step {
                r = r.rotate60_about(c);
            }
            assert_ne!(r, p, "order must be exactly 6");
        }
    }

    #[test]
    fn rotate60_unit_step() {
        let origin = AxialCoord::new(0, 0);
        assert_eq!(
            AxialCoord::new(1, 0).rotate60_about(origin),
            AxialCoord::new(0, 1)
        );
    }

    #[test]
    fn rotate60_is_a_rigid_60_degree_turn() {
        // Physical check on pixel positions: same radius, angle moved by 60
        // degrees. Uses points whose whole orbit stays inside the grid.
        let g = GridSpec::new(9, 9).unwrap();
        let c = OffsetCoord::new(4, 4);
        let ca = c.to_axial();
        let (cx, cy) = g.pixel_center(c).unwrap();
        let p = OffsetCoord::new(3, 5);
        let q = p.to_axial().rotate60_about(ca).to_offset();
        let (px, py) = g.pixel_center(p).unwrap();
        let (qx, qy) = g.pixel_center(q).unwrap();
        let rp = ((px - cx).powi(2) + (py - cy).powi(2)).sqrt();
        let rq = ((qx - cx).powi(2) + (qy - cy).powi(2)).sqrt();
        assert!((rp - rq).abs() < 1e-12);
        let ang_p = (py - cy).atan2(px - cx);
        let ang_q = (qy - cy).atan2(qx - cx);
        let delta = (ang_q - ang_p).rem_euclid(std::f64::consts::TAU);
        let sixty = std::f64::consts::PI / 3.0;
        assert!(
            (delta - sixty).abs() < 1e-12 || (delta - 5.0 * sixty).abs() < 1e-12,
            "rotation step was {delta}"
        );
    }

    #[test]
    fn rotate60_preserves_distance_to_center() {
        let c = AxialCoord::new(2, 2);
        for q in -5..5 {
            for r in -5..5 {
                let p = AxialCoord::new(q, r);
                let rot = p.rotate60_about(c);
                assert_eq!(p.distance(c), rot.distance(c));
            }
        }
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0, 3).is_err());
        assert!(GridSpec::new(3, 0).is_err());
        assert!(GridSpec::with_pitch(3, 3, 0.0).is_err());
        assert!(GridSpec::with_pitch(3, 3, -1.0).is_err());
        assert!(GridSpec::with_pitch(3, 3, f64::NAN).is_err());
    }
}
