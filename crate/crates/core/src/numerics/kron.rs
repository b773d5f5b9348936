//! Kronecker products and column-major vectorization.
//!
//! `vec` stacks columns so that `vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)`. The
//! equivariance constraint matrix is assembled from that identity, so the
//! ordering here must stay column-major.

use super::DenseMatrix;
use crate::error::{shape_err, Result};

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DenseMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == 0.0 {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[(i * br + p, j * bc + q)] = s * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Stacks the columns of `m` into one vector.
pub fn vec(m: &DenseMatrix) -> Vec<f64> {
    let (rows, cols) = m.shape();
    let mut out = Vec::with_capacity(rows * cols);
    for j in 0..cols {
        for i in 0..rows {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec`].
pub fn unvec(v: &[f64], rows: usize, cols: usize) -> Result<DenseMatrix> {
    if v.len() != rows * cols {
        return Err(shape_err(
            "unvec",
            format!("{} entries for {rows}x{cols}", rows * cols),
            format!("{}", v.len()),
        ));
    }
    Ok(DenseMatrix::from_fn(rows, cols, |i, j| v[j * rows + i]))
}
