use crate::numerics::DenseMatrix;

/// Generator of 2D rotations, `[[0, -1], [1, 0]]`.
pub fn so2_generator() -> DenseMatrix {
    DenseMatrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]])
}

/// Infinitesimal rotations about the x, y and z axes.
pub fn so3_generators() -> [DenseMatrix; 3] {
    [
        DenseMatrix::from_rows(&[[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
        DenseMatrix::from_rows(&[[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
        DenseMatrix::from_rows(&[[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
    ]
}

/// Basis `E_ji − E_ij` (`i < j`, lexicographic) of `so(n)`; each element has
/// squared Frobenius norm 2 and the basis is orthogonal.
pub fn so_n_generators(n: usize) -> Vec<DenseMatrix> {
    assert!(n >= 2, "so(n) needs n >= 2");
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut a = DenseMatrix::zeros(n, n);
            a[(j, i)] = 1.0;
            a[(i, j)] = -1.0;
            out.push(a);
        }
    }
    out
}

/// Cyclic shift `e_i ↦ e_{i+1 mod n}` on ℝⁿ.
pub fn cyclic_shift(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| if (j + 1) % n == i { 1.0 } else { 0.0 })
}

/// Planar rotation by `theta`.
pub fn rotation_2d(theta: f64) -> DenseMatrix {
    let (s, c) = theta.sin_cos();
    DenseMatrix::from_rows(&[[c, -s], [s, c]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::expm;

    #[test]
    fn so2_generator_literal_and_half_turn() {
        let a = so2_generator();
        assert_eq!(a, DenseMatrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]));
        assert_eq!(a.transpose(), -&a);
        let half = expm(&a.scale(std::f64::consts::PI)).unwrap();
        assert!((&half + &DenseMatrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn so_n_dimension_and_skew() {
        let g = so_n_generators(5);
        assert_eq!(g.len(), 10);
        for (p, a) in g.iter().enumerate() {
            assert_eq!((a + &a.transpose()).max_abs(), 0.0);
            for (q, b) in g.iter().enumerate() {
                let ip: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum();
                assert_eq!(ip, if p == q { 2.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn so3_matches_so_n_up_to_sign() {
        let s3 = so3_generators();
        let sn = so_n_generators(3);
        // so_n order: (0,1)=z, (0,2)=-y, (1,2)=x
        assert_eq!(sn[0], s3[2]);
        assert_eq!(sn[1], -&s3[1]);
        assert_eq!(sn[2], s3[0]);
    }
}
