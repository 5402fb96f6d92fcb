//! Hexagonal filter weights and their rectangular sub-kernel decomposition.

use crate::error::HexError;
use crate::layout::KernelLayout;

/// A size-`n` hexagonal filter bank.
///
/// Weights are stored flat, indexed `(out_channel, in_channel, element)`
/// with elements in canonical [`KernelLayout`] order. One bias per output
/// channel (zero when the caller supplies none).
#[derive(Debug, Clone, PartialEq)]
pub struct HexKernel {
    size: u32,
    out_channels: usize,
    in_channels: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
    debug: bool,
}

impl HexKernel {
    pub fn new(
        size: u32,
        out_channels: usize,
        in_channels: usize,
        weights: Vec<f64>,
        bias: Option<Vec<f64>>,
    ) -> Result<Self, HexError> {
        let per_pair = KernelLayout::new(size).element_count();
        let expected = out_channels * in_channels * per_pair;
        if weights.len() != expected {
            return Err(HexError::WeightCount {
                expected,
                got: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(HexError::NonFinite { index });
        }
        let bias = match bias {
            Some(b) => {
                if b.len() != out_channels {
                    return Err(HexError::BiasCount {
                        expected: out_channels,
                        got: b.len(),
                    });
                }
                if let Some(index) = b.iter().position(|w| !w.is_finite()) {
                    return Err(HexError::NonFinite { index });
                }
                b
            }
            None => vec![0.0; out_channels],
        };
        Ok(HexKernel {
            size,
            out_channels,
            in_channels,
            weights,
            bias,
            debug: false,
        })
    }

    /// The all-ones, zero-bias kernel used for structure-preserving demos:
    /// one output channel, every element weight 1.
    pub fn debug(size: u32, in_channels: usize) -> Self {
        let per_pair = KernelLayout::new(size).element_count();
        HexKernel {
            size,
            out_channels: 1,
            in_channels,
            weights: vec![1.0; in_channels * per_pair],
            bias: vec![0.0],
            debug: true,
        }
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn layout(&self) -> KernelLayout {
        KernelLayout::new(self.size)
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn element_count(&self) -> usize {
        KernelLayout::new(self.size).element_count()
    }

    pub fn is_debug(&self) -> bool {
        self.debug
    }

    /// Elements for one `(out_channel, in_channel)` pair, canonical order.
    #[inline]
    pub fn weights_for(&self, oc: usize, ic: usize) -> &[f64] {
        let per = self.element_count();
        let start = (oc * self.in_channels + ic) * per;
        &self.weights[start..start + per]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        self.debug = false;
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        self.debug = false;
        &mut self.bias
    }

    /// Simultaneous mutable views of weights and bias, for optimizers.
    pub fn params_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        self.debug = false;
        (&mut self.weights, &mut self.bias)
    }
}

/// Hexagonal filter bank extended along a depth axis: `depth` independent
/// weight slices per channel pair, each in canonical element order. The
/// depth extent must be odd so a center slice exists.
#[derive(Debug, Clone, PartialEq)]
pub struct HexKernel3d {
    size: u32,
    depth: usize,
    out_channels: usize,
    in_channels: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl HexKernel3d {
    pub fn new(
        size: u32,
        depth: usize,
        out_channels: usize,
        in_channels: usize,
        weights: Vec<f64>,
        bias: Option<Vec<f64>>,
    ) -> Result<Self, HexError> {
        if depth % 2 == 0 {
            return Err(HexError::EvenDepthKernel { kd: depth });
        }
        let per_pair = KernelLayout::new(size).element_count() * depth;
        let expected = out_channels * in_channels * per_pair;
        if weights.len() != expected {
            return Err(HexError::WeightCount {
                expected,
                got: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(HexError::NonFinite { index });
        }
        let bias = match bias {
            Some(b) => {
                if b.len() != out_channels {
                    return Err(HexError::BiasCount {
                        expected: out_channels,
                        got: b.len(),
                    });
                }
                b
            }
            None => vec![0.0; out_channels],
        };
        Ok(HexKernel3d {
            size,
            depth,
            out_channels,
            in_channels,
            weights,
            bias,
        })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// Elements of one depth slice for one channel pair.
    pub fn weights_for(&self, oc: usize, ic: usize, z: usize) -> &[f64] {
        let per_el = KernelLayout::new(self.size).element_count();
        let start = ((oc * self.in_channels + ic) * self.depth + z) * per_el;
        &self.weights[start..start + per_el]
    }

    /// The 2D kernel formed by one depth slice across all channel pairs.
    pub fn slice_kernel(&self, z: usize) -> HexKernel {
        let per_el = KernelLayout::new(self.size).element_count();
        let mut w = Vec::with_capacity(self.out_channels * self.in_channels * per_el);
        for oc in 0..self.out_channels {
            for ic in 0..self.in_channels {
                w.extend_from_slice(self.weights_for(oc, ic, z));
            }
        }
        HexKernel::new(self.size, self.out_channels, self.in_channels, w, None).unwrap()
    }
}

/// One rectangular slice of a hexagonal kernel.
///
/// The sub-kernel at offset `i ≥ 1` has two value-bearing columns landing
/// at horizontal offsets −i and +i from the center (horizontal dilation
/// 2i); offset 0 is the single central column.
#[derive(Debug, Clone, PartialEq)]
pub struct SubKernel {
    pub offset: u32,
    pub height: usize,
    pub dilation: u32,
    weights: Vec<f64>,
}

impl SubKernel {
    pub fn sides(&self) -> usize {
        if self.offset == 0 {
            1
        } else {
            2
        }
    }

    /// Column of `height` weights for one channel pair; `side` 0 is the
    /// −offset column, `side` 1 the +offset column.
    #[inline]
    pub fn column(&self, oc: usize, ic: usize, in_channels: usize, side: usize) -> &[f64] {
        debug_assert!(side < self.sides());
        let per_pair = self.sides() * self.height;
        let start = (oc * in_channels + ic) * per_pair + side * self.height;
        &self.weights[start..start + self.height]
    }

    pub fn value_count_per_pair(&self) -> usize {
        self.sides() * self.height
    }

    /// Full weight buffer, indexed `(out_channel, in_channel, side, slot)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// The `n+1` rectangular sub-kernels realizing a size-`n` hexagonal kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct SubKernelSet {
    pub size: u32,
    pub out_channels: usize,
    pub in_channels: usize,
    pub bias: Vec<f64>,
    subs: Vec<SubKernel>,
}

/// Splits a hexagonal kernel into its rectangular sub-kernels. Sub-kernel
/// `i` collects kernel columns −i and +i, preserving the top-to-bottom
/// element order within each column.
pub fn decompose(k: &HexKernel) -> SubKernelSet {
    let n = k.size();
    let layout = k.layout();
    let mut subs = Vec::with_capacity(n as usize + 1);
    for i in 0..=n {
        let height = layout.column_height(i as i64);
        let sides = if i == 0 { 1 } else { 2 };
        let mut weights = Vec::with_capacity(k.out_channels() * k.in_channels() * sides * height);
        for oc in 0..k.out_channels() {
            for ic in 0..k.in_channels() {
                let pair = k.weights_for(oc, ic);
                let left = layout.column_start(-(i as i64));
                weights.extend_from_slice(&pair[left..left + height]);
                if i > 0 {
                    let right = layout.column_start(i as i64);
                    weights.extend_from_slice(&pair[right..right + height]);
                }
            }
        }
        subs.push(SubKernel {
            offset: i,
            height,
            dilation: 2 * i,
            weights,
        });
    }
    SubKernelSet {
        size: n,
        out_channels: k.out_channels(),
        in_channels: k.in_channels(),
        bias: k.bias().to_vec(),
        subs,
    }
}

impl SubKernelSet {
    pub fn subs(&self) -> &[SubKernel] {
        &self.subs
    }

    /// Reassembles the canonical flat weight vector. Must be bit-identical
    /// to the source kernel's weights.
    pub fn flatten(&self) -> Vec<f64> {
        let layout = KernelLayout::new(self.size);
        let per = layout.element_count();
        let n = self.size as i64;
        let mut out = vec![0.0; self.out_channels * self.in_channels * per];
        for oc in 0..self.out_channels {
            for ic in 0..self.in_channels {
                let base = (oc * self.in_channels + ic) * per;
                for sub in &self.subs {
                    for side in 0..sub.sides() {
                        let dc = if side == 0 {
                            -(sub.offset as i64)
                        } else {
                            sub.offset as i64
                        };
                        debug_assert!(dc.abs() <= n);
                        let col = layout.column_start(dc);
                        let src = sub.column(oc, ic, self.in_channels, side);
                        out[base + col..base + col + sub.height].copy_from_slice(src);
                    }
                }
            }
        }
        out
    }
}
