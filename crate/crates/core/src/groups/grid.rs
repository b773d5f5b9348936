use serde::{Deserialize, Serialize};

use crate::numerics::DenseMatrix;

/// Pre-image coordinates closer than this to an integer are snapped, so
/// quarter turns produce exact permutation matrices.
const SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Nearest,
    Bilinear,
}

/// Linear action of rotating a `k × k` image by `theta` (counter-clockwise)
/// about its geometric center, on row-major flattened pixels.
///
/// Row `i` holds the interpolation weights of the pre-image of output pixel
/// `i`; samples falling outside the grid contribute zero.
pub fn grid_rotation_rep(k: usize, theta: f64, interp: Interpolation) -> DenseMatrix {
    assert!(k >= 2, "grid side must be at least 2");
    let n = k * k;
    let center = (k as f64 - 1.0) / 2.0;
    let (s, c) = theta.sin_cos();
    let mut m = DenseMatrix::zeros(n, n);
    let snap = |v: f64| if (v - v.round()).abs() < SNAP { v.round() } else { v };
    let inside = |v: f64| v >= 0.0 && v <= (k - 1) as f64;

    for r in 0..k {
        for col in 0..k {
            let x = col as f64 - center;
            let y = center - r as f64;
            // rotate the output location by -theta
            let xs = c * x + s * y;
            let ys = -s * x + c * y;
            let src_col = snap(xs + center);
            let src_row = snap(center - ys);
            let out = r * k + col;
            match interp {
                Interpolation::Nearest => {
                    let (rr, cc) = (src_row.round(), src_col.round());
                    if inside(rr) && inside(cc) {
                        m[(out, rr as usize * k + cc as usize)] = 1.0;
                    }
                }
                Interpolation::Bilinear => {
                    let (r0, c0) = (src_row.floor(), src_col.floor());
                    let (fr, fc) = (src_row - r0, src_col - c0);
                    for (dr, wr) in [(0.0, 1.0 - fr), (1.0, fr)] {
                        for (dc, wc) in [(0.0, 1.0 - fc), (1.0, fc)] {
                            let w = wr * wc;
                            let (rr, cc) = (r0 + dr, c0 + dc);
                            if w > 0.0 && inside(rr) && inside(cc) {
                                m[(out, rr as usize * k + cc as usize)] += w;
                            }
                        }
                    }
                }
            }
        }
    }
    m
}
