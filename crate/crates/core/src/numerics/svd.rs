use super::DenseMatrix;
use crate::error::{Error, Result};

/// Thin singular value decomposition `m = U·diag(sigma)·Vᵀ` with the
/// singular values in ascending order.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `rows × p` with orthonormal columns, `p = min(rows, cols)`.
    pub u: DenseMatrix,
    /// Ascending, non-negative.
    pub sigma: Vec<f64>,
    /// `cols × p` with orthonormal columns.
    pub v: DenseMatrix,
}

impl SvdResult {
    /// `U·diag(sigma)·Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for j in 0..us.cols() {
            let s = self.sigma[j];
            for i in 0..us.rows() {
                us[(i, j)] *= s;
            }
        }
        &us * &self.v.transpose()
    }
}

/// Thin SVD, backed by faer's bidiagonal divide-and-conquer solver.
///
/// faer returns singular values in descending order; the triplets are
/// reversed so index 0 is the smallest.
pub fn svd(m: &DenseMatrix) -> Result<SvdResult> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("svd of a non-finite matrix".into()));
    }
    let (rows, cols) = m.shape();
    let p = rows.min(cols);
    if p == 0 {
        return Ok(SvdResult {
            u: DenseMatrix::zeros(rows, 0),
            sigma: Vec::new(),
            v: DenseMatrix::zeros(cols, 0),
        });
    }
    let f = m.to_faer();
    let dec = f
        .thin_svd()
        .map_err(|e| Error::Decomposition(format!("svd did not converge: {e:?}")))?;
    let (fu, fs, fv) = (dec.U(), dec.S(), dec.V());

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));

    let u = DenseMatrix::from_fn(rows, p, |i, j| fu[(i, order[j])]);
    let v = DenseMatrix::from_fn(cols, p, |i, j| fv[(i, order[j])]);
    let sigma = order.iter().map(|&k| fs[k].max(0.0)).collect();
    Ok(SvdResult { u, sigma, v })
}

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending. Only the
/// lower triangle is read.
pub(crate) fn symmetric_eigen(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0, 0)));
    }
    let dec = m
        .to_faer()
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Decomposition(format!("symmetric eigensolver failed: {e:?}")))?;
    let (fu, fs) = (dec.U(), dec.S());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
    let values = order.iter().map(|&k| fs[k]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| fu[(i, order[j])]);
    Ok((values, vectors))
}
