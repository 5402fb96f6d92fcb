//! Convolution and pooling on hexagonally sampled data.
//!
//! A hexagonal grid is stored as a rectangular tensor by aligning its two
//! interleaved rectangular sub-grids: every odd-indexed column, which sits
//! half a pixel pitch lower in physical space, is shifted up into row
//! alignment. All operations in this crate are defined against that fixed
//! convention.
//!
//! The crate ships two implementations of every grid operation:
//!
//! * [`oracle`]: slow, obviously-correct reference code that gathers
//!   neighbors one by one in axial coordinates,
//! * [`engine`]: the fast path, which decomposes a hexagonal kernel into
//!   rectangular sub-kernels and runs parity-aware padded column passes.
//!
//! The engine is tested for numerical equivalence against the oracle; the
//! oracle is tested against closed-form and brute-force geometry.

pub mod coords;
pub mod engine;
mod error;
pub mod kernel;
pub mod layout;
pub mod oracle;
pub mod stride;
pub mod tensor;

pub use coords::{AxialCoord, GridSpec, OffsetCoord};
pub use error::HexError;
pub use kernel::{HexKernel, HexKernel3d, SubKernel, SubKernelSet};
pub use layout::KernelLayout;
pub use stride::StrideLattice;
pub use tensor::{HexTensor, HexVolume, PoolMode, SquareTensor};
