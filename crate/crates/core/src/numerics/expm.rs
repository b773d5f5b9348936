use super::DenseMatrix;
use crate::error::{Error, Result};

/// Taylor degree used after scaling; with `‖A/2^s‖₁ ≤ 1/2` the truncation
/// error is below `0.5¹⁹/19! ≈ 1.6e-23`.
const TAYLOR_DEGREE: usize = 18;

/// Matrix exponential by scaling and squaring with a fixed-degree Taylor
/// series.
pub fn expm(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "expm needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if !norm1.is_finite() {
        return Err(Error::InvalidInput("expm of a non-finite matrix".into()));
    }
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scale(0.5f64.powi(squarings));

    // Horner evaluation of Σ aᵏ/k!
    let id = DenseMatrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=TAYLOR_DEGREE).rev() {
        acc = &id + &(&a * &acc).scale(1.0 / k as f64);
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    Ok(acc)
}
