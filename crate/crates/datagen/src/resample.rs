//! Interpolation from the hexagonal grid onto square rasters.
//!
//! The square raster covers the physical bounding box of the hex pixel
//! centers, split into `side x side` equal cells with values sampled at the
//! cell centers. Each square pixel takes the inverse-distance-weighted
//! (power 2) average of the 3 nearest hex pixel centers; a square pixel
//! that lands exactly on a hex center copies it. The stencil depends only
//! on the grid and factor, so it is computed once and reused per image.

use hexgrid_core::{GridSpec, HexTensor, SquareTensor};

use crate::DataError;

const NEIGHBORS: usize = 3;

/// Precomputed interpolation stencil from one hex grid to one square side.
#[derive(Debug, Clone)]
pub struct ResamplePlan {
    rows: usize,
    cols: usize,
    side: usize,
    /// Per square pixel: the 3 nearest hex cell indices and their weights
    /// (weights sum to 1).
    stencil: Vec<([usize; NEIGHBORS], [f64; NEIGHBORS])>,
}

impl ResamplePlan {
    /// Factor 1 matches the hex pixel count (side = round(sqrt(cells)));
    /// factor 2 doubles the side, quadrupling the pixel count.
    pub fn new(grid: &GridSpec, factor: u32) -> Result<Self, DataError> {
        if !(1..=2).contains(&factor) {
            return Err(DataError::BadFactor(factor));
        }
        let base = (grid.len() as f64).sqrt().round() as usize;
        let side = base.max(1) * factor as usize;

        let centers: Vec<(f64, f64)> = grid
            .iter()
            .map(|p| grid.pixel_center(p).expect("iterated cells are in-grid"))
            .collect();
        let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &centers {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !(x1 > x0 && y1 > y0) {
            return Err(DataError::DegenerateBounds {
                rows: grid.rows,
                cols: grid.cols,
            });
        }

        let (w, h) = (x1 - x0, y1 - y0);
        let mut stencil = Vec::with_capacity(side * side);
        for r in 0..side {
            // square row 0 at the top, like the hex grid
            let y = y1 - (r as f64 + 0.5) * h / side as f64;
            for c in 0..side {
                let x = x0 + (c as f64 + 0.5) * w / side as f64;
                stencil.push(nearest_three(&centers, x, y));
            }
        }
        Ok(ResamplePlan {
            rows: grid.rows,
            cols: grid.cols,
            side,
            stencil,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Interpolates every batch entry and channel of `x`.
    pub fn apply(&self, x: &HexTensor) -> Result<SquareTensor, DataError> {
        if x.rows() != self.rows || x.cols() != self.cols {
            return Err(DataError::Hex(hexgrid_core::HexError::ShapeMismatch(
                format!(
                    "plan built for {}x{}, image is {}x{}",
                    self.rows,
                    self.cols,
                    x.rows(),
                    x.cols()
                ),
            )));
        }
        let mut out = SquareTensor::zeros(x.batch(), x.channels(), self.side, self.side);
        for b in 0..x.batch() {
            for ch in 0..x.channels() {
                let plane = x.plane(b, ch);
                let dst = out.plane_mut(b, ch);
                for (d, (idx, w)) in dst.iter_mut().zip(&self.stencil) {
                    *d = idx
                        .iter()
                        .zip(w)
                        .map(|(&i, &wi)| wi * plane[i])
                        .sum();
                }
            }
        }
        Ok(out)
    }
}

/// Indices and normalized inverse-square-distance weights of the 3 hex
/// centers nearest to `(x, y)`. An exact hit takes the whole weight.
fn nearest_three(
    centers: &[(f64, f64)],
    x: f64,
    y: f64,
) -> ([usize; NEIGHBORS], [f64; NEIGHBORS]) {
    let mut best = [(f64::INFINITY, 0usize); NEIGHBORS];
    for (i, &(cx, cy)) in centers.iter().enumerate() {
        let d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        if d2 < best[NEIGHBORS - 1].0 {
            best[NEIGHBORS - 1] = (d2, i);
            let mut k = NEIGHBORS - 1;
            while k > 0 && best[k].0 < best[k - 1].0 {
                best.swap(k, k - 1);
                k -= 1;
            }
        }
    }
    let idx = [best[0].1, best[1].1, best[2].1];
    // an (effectively) exact hit would blow up 1/d^2; copy that pixel
    if best[0].0 < 1e-24 {
        return (idx, [1.0, 0.0, 0.0]);
    }
    let raw = [1.0 / best[0].0, 1.0 / best[1].0, 1.0 / best[2].0];
    let total: f64 = raw.iter().sum();
    (idx, [raw[0] / total, raw[1] / total, raw[2] / total])
}

/// One-shot convenience around [`ResamplePlan`].
pub fn resample_to_square(x: &HexTensor, factor: u32) -> Result<SquareTensor, DataError> {
    ResamplePlan::new(x.grid(), factor)?.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hexgrid_core::OffsetCoord;

    fn grid(rows: usize, cols: usize) -> GridSpec {
        GridSpec::new(rows, cols).unwrap()
    }

    #[test]
    fn matched_side_is_sqrt_of_cells() {
        assert_eq!(ResamplePlan::new(&grid(16, 16), 1).unwrap().side(), 16);
        assert_eq!(ResamplePlan::new(&grid(16, 16), 2).unwrap().side(), 32);
        // 6x8 = 48 cells, sqrt = 6.93 -> 7
        assert_eq!(ResamplePlan::new(&grid(6, 8), 1).unwrap().side(), 7);
    }

    #[test]
    fn factor_two_quadruples_the_pixel_count() {
        let small = ResamplePlan::new(&grid(16, 16), 1).unwrap();
        let large = ResamplePlan::new(&grid(16, 16), 2).unwrap();
        assert_eq!(
            large.side() * large.side(),
            4 * small.side() * small.side()
        );
    }

    #[test]
    fn weights_partition_unity_so_constants_survive() {
        let g = grid(9, 10);
        let x = HexTensor::from_values(2, 1, g, vec![2.5; 2 * 90]).unwrap();
        for factor in [1, 2] {
            let out = resample_to_square(&x, factor).unwrap();
            for &v in out.values() {
                assert!((v - 2.5).abs() < 1e-12, "factor {factor}: {v}");
            }
        }
    }

    #[test]
    fn impulse_stays_local_and_bounded() {
        let g = grid(9, 9);
        let mut x = HexTensor::zeros(1, 1, g);
        let impulse = OffsetCoord::new(4, 4);
        x.set(0, 0, impulse, 1.0);
        let (ix, iy) = g.pixel_center(impulse).unwrap();

        let plan = ResamplePlan::new(&g, 1).unwrap();
        let out = plan.apply(&x).unwrap();
        assert!(out.values().iter().all(|&v| v >= 0.0));
        let mass: f64 = out.values().iter().sum();
        assert!(mass > 1.0 / 3.0 && mass < 3.0, "mass {mass}");

        // hottest square pixel is the one whose center is nearest the impulse
        let side = plan.side();
        let mut hottest = 0;
        for i in 0..side * side {
            if out.values()[i] > out.values()[hottest] {
                hottest = i;
            }
        }
        let sq_center = |i: usize| {
            let (r, c) = (i / side, i % side);
            let (x0, x1) = (0.0, (g.cols - 1) as f64 * hexgrid_core::coords::SQRT3 / 2.0);
            let (y1, y0) = (0.0, -((g.rows - 1) as f64 + 0.5));
            (
                x0 + (c as f64 + 0.5) * (x1 - x0) / side as f64,
                y1 - (r as f64 + 0.5) * (y1 - y0).abs() / side as f64,
            )
        };
        let mut nearest = 0;
        let mut best = f64::INFINITY;
        for i in 0..side * side {
            let (sx, sy) = sq_center(i);
            let d2 = (sx - ix) * (sx - ix) + (sy - iy) * (sy - iy);
            if d2 < best {
                best = d2;
                nearest = i;
            }
        }
        assert_eq!(hottest, nearest);
    }

    #[test]
    fn exact_hits_copy_the_hex_pixel() {
        let (idx, w) = nearest_three(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], 0.0, 0.0);
        assert_eq!(idx[0], 0);
        assert_eq!(w, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn resampling_is_deterministic() {
        let g = grid(8, 8);
        let vals: Vec<f64> = (0..64).map(|i| (i as f64).sin()).collect();
        let x = HexTensor::from_values(1, 1, g, vals).unwrap();
        let a = resample_to_square(&x, 1).unwrap();
        let b = resample_to_square(&x, 1).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn degenerate_grids_are_rejected() {
        let x = HexTensor::zeros(1, 1, grid(1, 1));
        assert!(matches!(
            resample_to_square(&x, 1),
            Err(DataError::DegenerateBounds { rows: 1, cols: 1 })
        ));
        let col = HexTensor::zeros(1, 1, grid(3, 1));
        assert!(matches!(
            resample_to_square(&col, 1),
            Err(DataError::DegenerateBounds { .. })
        ));
        let x = HexTensor::zeros(1, 1, grid(4, 4));
        assert!(matches!(
            resample_to_square(&x, 3),
            Err(DataError::BadFactor(3))
        ));
    }

    #[test]
    fn plan_rejects_mismatched_images() {
        let plan = ResamplePlan::new(&grid(4, 4), 1).unwrap();
        let x = HexTensor::zeros(1, 1, grid(5, 4));
        assert!(plan.apply(&x).is_err());
    }
}
