//! Real Schur form of normal matrices.
//!
//! For a normal `m`, the symmetric matrix `mᵀm` commutes with `m`, so each of
//! its eigenspaces is `m`-invariant and carries eigenvalues of a single
//! modulus. Splitting those spaces again by the symmetric part `(m + mᵀ)/2`
//! isolates eigenvalue pairs `a ± ib`; on each such space the skew part
//! squares to `-b²·I` and pairs vectors into invariant planes. Every 2×2
//! block comes out as `[[a, -b], [b, a]]` with `b > 0`, so two equivalent
//! blocks are literally equal and the commutant of a block is the
//! `[[α, β], [-β, α]]` family.

use super::svd::symmetric_eigen;
use super::DenseMatrix;
use crate::error::{Error, Result};

/// Relative normality tolerance: `‖m·mᵀ − mᵀ·m‖_F ≤ NORMALITY_TOL·‖m‖_F²`.
pub const NORMALITY_TOL: f64 = 1e-8;

/// A 1×1 or 2×2 diagonal block of a real Schur form.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurBlock {
    /// 1 or 2.
    pub size: usize,
    /// `[a]` or `[[a, -b], [b, a]]` with `b > 0`.
    pub entries: DenseMatrix,
    /// Modulus of the block's eigenvalues.
    pub lambda: f64,
}

impl SchurBlock {
    pub fn scalar(a: f64) -> Self {
        Self {
            size: 1,
            entries: DenseMatrix::from_rows(&[[a]]),
            lambda: a.abs(),
        }
    }

    /// Rotation-scaling block with eigenvalues `a ± i·b`.
    pub fn rotation(a: f64, b: f64) -> Self {
        let b = b.abs();
        Self {
            size: 2,
            entries: DenseMatrix::from_rows(&[[a, -b], [b, a]]),
            lambda: a.hypot(b),
        }
    }

    /// Real part of the eigenvalues.
    pub fn real_part(&self) -> f64 {
        self.entries[(0, 0)]
    }

    /// `|Im λ|`; zero for 1×1 blocks.
    pub fn imag_abs(&self) -> f64 {
        if self.size == 2 {
            self.entries[(1, 0)].abs()
        } else {
            0.0
        }
    }

    /// Whether the two blocks share their eigenvalues within `tol`.
    pub fn equivalent(&self, other: &Self, tol: f64) -> bool {
        self.size == other.size
            && (self.real_part() - other.real_part()).abs() <= tol
            && (self.imag_abs() - other.imag_abs()).abs() <= tol
    }
}

/// `m = U·Σ·Uᵀ` with `Σ = blockdiag(blocks)` and `U` orthogonal.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub u: DenseMatrix,
    pub blocks: Vec<SchurBlock>,
}

impl SchurForm {
    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    /// Starting row/column of each block within `Σ`.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let start = *acc;
                *acc += b.size;
                Some(start)
            })
            .collect()
    }

    /// The block-diagonal `Σ`.
    pub fn sigma(&self) -> DenseMatrix {
        let n = self.dim();
        let mut s = DenseMatrix::zeros(n, n);
        for (b, off) in self.blocks.iter().zip(self.offsets()) {
            s.set_block(off, off, &b.entries);
        }
        s
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        &(&self.u * &self.sigma()) * &self.u.transpose()
    }
}

/// Real Schur decomposition of a normal matrix.
///
/// Fails with [`Error::NotNormal`] when the commutator `‖m·mᵀ − mᵀ·m‖_F`
/// exceeds `1e-8·‖m‖_F²`.
pub fn schur_normal(m: &DenseMatrix) -> Result<SchurForm> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "schur_normal needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::InvalidInput("schur_normal of a non-finite matrix".into()));
    }
    let n = m.rows();
    let fro = m.frobenius_norm();
    let commutator = m.commutator_with_transpose();
    let tolerance = NORMALITY_TOL * fro * fro;
    if commutator > tolerance {
        return Err(Error::NotNormal { commutator, tolerance });
    }
    if fro == 0.0 {
        return Ok(SchurForm {
            u: DenseMatrix::identity(n),
            blocks: vec![SchurBlock::scalar(0.0); n],
        });
    }

    let mt = m.transpose();
    let gram = &mt * m;
    let sym = (m + &mt).scale(0.5);
    let skew = (m - &mt).scale(0.5);

    let (mu, q) = symmetric_eigen(&gram)?;
    let scale = mu.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let norm2 = scale.sqrt();
    let mu_tol = 1e-9 * scale;
    let re_tol = 1e-8 * norm2;

    // (lambda, block, columns of U)
    let mut pieces: Vec<(SchurBlock, Vec<Vec<f64>>)> = Vec::with_capacity(n);

    for modulus_cluster in clusters(&mu, mu_tol) {
        let q1 = columns_of(&q, &modulus_cluster);
        let h = congruence(&q1, &sym);
        let (re, hv) = symmetric_eigen(&h)?;
        for re_cluster in clusters(&re, re_tol) {
            let q2 = &q1 * &columns_of(&hv, &re_cluster);
            let c = q2.cols();
            let k = congruence(&q2, &skew);
            let b_sq = k.frobenius_norm().powi(2) / c as f64;
            if b_sq.sqrt() <= re_tol {
                for j in 0..c {
                    let col = q2.column(j);
                    let a = rayleigh(m, &col, &col);
                    pieces.push((SchurBlock::scalar(a), vec![col]));
                }
                continue;
            }
            if c % 2 == 1 {
                return Err(Error::Decomposition(format!(
                    "odd-dimensional invariant subspace ({c}) for a complex eigenvalue pair"
                )));
            }
            for (v, w) in pair_planes(&k)? {
                let u1 = q2.matvec(&v)?;
                let u2 = q2.matvec(&w)?;
                let a = 0.5 * (rayleigh(m, &u1, &u1) + rayleigh(m, &u2, &u2));
                let b = 0.5 * (rayleigh(m, &u2, &u1) - rayleigh(m, &u1, &u2));
                pieces.push((SchurBlock::rotation(a, b), vec![u1, u2]));
            }
        }
    }

    // Largest modulus first; stable so equal-modulus blocks keep discovery order.
    pieces.sort_by(|x, y| y.0.lambda.total_cmp(&x.0.lambda));

    let mut u = DenseMatrix::zeros(n, n);
    let mut col = 0;
    let mut blocks = Vec::with_capacity(pieces.len());
    for (block, cols) in pieces {
        for c in &cols {
            u.set_column(col, c);
            col += 1;
        }
        blocks.push(block);
    }
    debug_assert_eq!(col, n);
    Ok(SchurForm { u, blocks })
}

/// Groups indices of an ascending sequence into runs whose consecutive gaps
/// are at most `tol`.
fn clusters(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(run) if (v - values[*run.last().unwrap()]).abs() <= tol => run.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

fn columns_of(m: &DenseMatrix, idx: &[usize]) -> DenseMatrix {
    DenseMatrix::from_fn(m.rows(), idx.len(), |i, j| m[(i, idx[j])])
}

/// `qᵀ·a·q`.
fn congruence(q: &DenseMatrix, a: &DenseMatrix) -> DenseMatrix {
    &(&q.transpose() * a) * q
}

/// `xᵀ·m·y`.
fn rayleigh(m: &DenseMatrix, x: &[f64], y: &[f64]) -> f64 {
    let my = m.matvec(y).expect("square");
    x.iter().zip(&my).map(|(a, b)| a * b).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for c in against {
            let p = dot(v, c);
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= p * ci;
            }
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Splits the space on which the skew matrix `k` acts (with `k² = −b²·I`)
/// into orthonormal pairs `(v, k·v/‖k·v‖)`.
fn pair_planes(k: &DenseMatrix) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let c = k.rows();
    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(c);
    let mut pairs = Vec::with_capacity(c / 2);
    for j in 0..c {
        if chosen.len() == c {
            break;
        }
        let mut v = vec![0.0; c];
        v[j] = 1.0;
        orthogonalize(&mut v, &chosen);
        if normalize(&mut v) < 0.5 {
            continue;
        }
        let mut w = k.matvec(&v)?;
        orthogonalize(&mut w, &chosen);
        let along = dot(&w, &v);
        w.iter_mut().zip(&v).for_each(|(wi, vi)| *wi -= along * vi);
        if normalize(&mut w) == 0.0 {
            return Err(Error::Decomposition("degenerate invariant plane".into()));
        }
        chosen.push(v.clone());
        chosen.push(w.clone());
        pairs.push((v, w));
    }
    if chosen.len() != c {
        return Err(Error::Decomposition("failed to pair invariant planes".into()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_generator_about_z() {
        let az = DenseMatrix::from_rows(&[[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let s = schur_normal(&az).unwrap();
        assert_eq!(s.blocks.len(), 2);
        assert_eq!(s.blocks[0].size, 2);
        assert!((&s.blocks[0].entries - &DenseMatrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]])).max_abs() < 1e-14);
        assert!((s.blocks[0].lambda - 1.0).abs() < 1e-14);
        assert_eq!(s.blocks[1].size, 1);
        assert!(s.blocks[1].lambda.abs() < 1e-14);
        assert!((&s.reconstruct() - &az).frobenius_norm() < 1e-13);
    }

    #[test]
    fn symmetric_diagonal() {
        let m = DenseMatrix::diag(&[3.0, -2.0]);
        let s = schur_normal(&m).unwrap();
        let mut lambdas: Vec<f64> = s.blocks.iter().map(|b| b.lambda).collect();
        lambdas.sort_by(f64::total_cmp);
        assert!(s.blocks.iter().all(|b| b.size == 1));
        assert!((lambdas[0] - 2.0).abs() < 1e-14 && (lambdas[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn same_modulus_different_real_parts_split() {
        // eigenvalues 1 and -1 share |λ| but are not equivalent
        let m = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let s = schur_normal(&m).unwrap();
        assert!(s.blocks.iter().all(|b| b.size == 1));
        assert!((&s.reconstruct() - &m).frobenius_norm() < 1e-13);
    }

    #[test]
    fn rejects_non_normal_with_commutator_in_message() {
        let m = DenseMatrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        let err = schur_normal(&m).unwrap_err();
        assert!(matches!(err, Error::NotNormal { .. }));
        assert!(err.to_string().contains("commutator"));
    }

    #[test]
    fn zero_matrix() {
        let s = schur_normal(&DenseMatrix::zeros(3, 3)).unwrap();
        assert_eq!(s.blocks.len(), 3);
        assert_eq!(s.u, DenseMatrix::identity(3));
    }

    #[test]
    fn cyclic_permutation_minus_identity() {
        // C4 shift on R^4: eigenvalues of P - I are 0, -2, -1 ± i
        let p = DenseMatrix::from_fn(4, 4, |i, j| if (j + 1) % 4 == i { 1.0 } else { 0.0 });
        let d = &p - &DenseMatrix::identity(4);
        let s = schur_normal(&d).unwrap();
        assert!((&s.reconstruct() - &d).frobenius_norm() < 1e-12);
        assert!(s.u.orthogonality_defect() < 1e-12);
        let two = s.blocks.iter().find(|b| b.size == 2).unwrap();
        assert!((two.real_part() + 1.0).abs() < 1e-12 && (two.imag_abs() - 1.0).abs() < 1e-12);
    }
}
