//! Reference implementations by explicit neighbor gathering.
//!
//! Everything here walks the axial-coordinate neighborhood of each kernel
//! center one cell at a time, recomputing neighbor positions per cell. It
//! is deliberately naive: these functions define correct behavior, and the
//! fast engine is tested against them. Keep them independent of the
//! engine's sub-kernel machinery.

use crate::coords::OffsetCoord;
use crate::error::HexError;
use crate::kernel::{HexKernel, HexKernel3d};
use crate::layout::KernelLayout;
use crate::stride::strided_lattice;
use crate::tensor::{HexTensor, HexVolume, PoolMode};

/// Hexagonal convolution (cross-correlation) with zero padding: out-of-grid
/// cells contribute nothing. Stride-1 output has the input's shape.
pub fn conv2d(x: &HexTensor, k: &HexKernel, stride: usize) -> Result<HexTensor, HexError> {
    if k.in_channels() != x.channels() {
        return Err(HexError::ChannelMismatch {
            expected: k.in_channels(),
            got: x.channels(),
        });
    }
    let lat = strided_lattice(x.grid(), stride)?;
    let grid = *x.grid();
    let offsets = k.layout().element_axial_offsets();
    let mut out = HexTensor::zeros(x.batch(), k.out_channels(), lat.output_grid(&grid));
    for b in 0..x.batch() {
        for oc in 0..k.out_channels() {
            for (r, c, center) in lat.centers() {
                let ca = center.to_axial();
                let mut acc = k.bias()[oc];
                for ic in 0..x.channels() {
                    let w = k.weights_for(oc, ic);
                    for (e, &(dq, dr)) in offsets.iter().enumerate() {
                        let pos = ca.offset_by(dq, dr).to_offset();
                        if grid.contains(pos) {
                            acc += w[e] * x.get(b, ic, pos);
                        }
                    }
                }
                out.set(b, oc, OffsetCoord::new(r as i64, c as i64), acc);
            }
        }
    }
    Ok(out)
}

/// Hexagonal pooling. Max takes the maximum over in-grid window cells;
/// avg divides by the in-grid cell count, so boundary windows stay
/// unbiased.
pub fn pool2d(
    x: &HexTensor,
    n: u32,
    stride: usize,
    mode: PoolMode,
) -> Result<HexTensor, HexError> {
    if n == 0 {
        return Err(HexError::ZeroPoolSize);
    }
    let lat = strided_lattice(x.grid(), stride)?;
    let grid = *x.grid();
    let offsets = KernelLayout::new(n).element_axial_offsets();
    let mut out = HexTensor::zeros(x.batch(), x.channels(), lat.output_grid(&grid));
    for b in 0..x.batch() {
        for ch in 0..x.channels() {
            for (r, c, center) in lat.centers() {
                let ca = center.to_axial();
                let agg = match mode {
                    PoolMode::Max => {
                        let mut m = f64::NEG_INFINITY;
                        for &(dq, dr) in &offsets {
                            let pos = ca.offset_by(dq, dr).to_offset();
                            if grid.contains(pos) {
                                m = m.max(x.get(b, ch, pos));
                            }
                        }
                        m
                    }
                    PoolMode::Avg => {
                        let mut sum = 0.0;
                        let mut count = 0usize;
                        for &(dq, dr) in &offsets {
                            let pos = ca.offset_by(dq, dr).to_offset();
                            if grid.contains(pos) {
                                sum += x.get(b, ch, pos);
                                count += 1;
                            }
                        }
                        sum / count as f64
                    }
                };
                out.set(b, ch, OffsetCoord::new(r as i64, c as i64), agg);
            }
        }
    }
    Ok(out)
}

/// Depth-extended hexagonal convolution: symmetric zero padding along
/// depth, depth stride as plain 1D subsampling anchored at slice 0.
pub fn conv3d(
    x: &HexVolume,
    k: &HexKernel3d,
    stride: usize,
    depth_stride: usize,
) -> Result<HexVolume, HexError> {
    if k.in_channels() != x.channels() {
        return Err(HexError::ChannelMismatch {
            expected: k.in_channels(),
            got: x.channels(),
        });
    }
    if depth_stride == 0 {
        return Err(HexError::ZeroStride);
    }
    let lat = strided_lattice(x.grid(), stride)?;
    let grid = *x.grid();
    let offsets = KernelLayout::new(k.size()).element_axial_offsets();
    let half = (k.depth() - 1) / 2;
    let out_depth = (x.depth() - 1) / depth_stride + 1;
    let out_grid = lat.output_grid(&grid);
    let mut out = HexVolume::zeros(x.batch(), k.out_channels(), out_depth, out_grid);
    for b in 0..x.batch() {
        for oc in 0..k.out_channels() {
            for zo in 0..out_depth {
                let zc = (zo * depth_stride) as i64;
                for (r, c, center) in lat.centers() {
                    let ca = center.to_axial();
                    let mut acc = k.bias()[oc];
                    for dz in -(half as i64)..=half as i64 {
                        let zi = zc + dz;
                        if zi < 0 || zi >= x.depth() as i64 {
                            continue;
                        }
                        let zk = (dz + half as i64) as usize;
                        for ic in 0..x.channels() {
                            let w = k.weights_for(oc, ic, zk);
                            for (e, &(dq, dr)) in offsets.iter().enumerate() {
                                let pos = ca.offset_by(dq, dr).to_offset();
                                if grid.contains(pos) {
                                    acc += w[e] * x.get(b, ic, zi as usize, pos);
                                }
                            }
                        }
                    }
                    let idx = (r * out.grid().cols + c) as usize;
                    let plane =
                        out.plane_mut(b, oc, zo);
                    plane[idx] = acc;
                }
            }
        }
    }
    Ok(out)
}
