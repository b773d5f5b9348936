//! Dense linear-algebra kernels: SVD, real Schur form of normal matrices,
//! matrix exponential, Kronecker products and vectorization.

mod expm;
mod kron;
mod matrix;
mod schur;
mod svd;

pub use expm::expm;
pub use kron::{kron, unvec, vec};
pub use matrix::DenseMatrix;
pub use schur::{schur_normal, SchurBlock, SchurForm, NORMALITY_TOL};
pub use svd::{svd, SvdResult};
