//! Weight-projection operators that enforce tunable ("soft") group
//! equivariance on linear layers.

pub mod bench;
pub mod error;
pub mod groups;
pub mod metrics;
pub mod projector;
pub mod numerics;

pub use error::{Error, Result};
pub use numerics::DenseMatrix;
pub use groups::{GroupElement, GroupKind, GroupSpec};
pub use projector::{Cutoff, Method, Projector, ProjectorKind, Route, SpectrumEntry};
