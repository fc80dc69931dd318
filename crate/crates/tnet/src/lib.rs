//! Dense tensor-network numerics.
//!
//! The crate is organised bottom-up: [`tensor`] holds the dense value type and
//! its primitive operations, [`netgraph`] contracts whole networks, and the
//! remaining modules build matrix product states and operators, ground-state
//! solvers, symmetry analysis and exact PEPS/MERA constructions on top.

pub mod exact;
pub mod groundstate;
pub mod linalg;
pub mod mera;
pub mod mpo;
pub mod mps;
pub mod netgraph;
pub mod partition;
pub mod peps;
pub mod qinfo;
pub mod symmetry;
pub mod tensor;

pub use tensor::{DenseTensor, SvdOptions, SvdResult, TensorError, C64};
