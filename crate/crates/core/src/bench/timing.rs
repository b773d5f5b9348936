use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::o5::median;
use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::projector::{build_equivariant_projector, Cutoff, SchurProjector, MATERIALIZE_LIMIT};

/// Largest grid side accepted by [`bench_decompositions`].
pub const MAX_BENCH_SIDE: usize = 14;
/// Cutoff used for the timed projectors; both routes agree here.
pub const BENCH_CUTOFF: f64 = 0.5;
/// Largest allowed gap `‖P_schur − P_svd‖_F / max(‖P_svd‖_F, 1)` between
/// the two routes.
pub const AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompRow {
    pub size: usize,
    pub svd_seconds: f64,
    pub schur_seconds: f64,
    /// `svd_seconds / schur_seconds`.
    pub ratio: f64,
    /// Worst relative Frobenius gap between the routes over the repeats.
    pub agreement: f64,
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

/// Median wall time of building the `C₄` grid→grid projector at
/// [`BENCH_CUTOFF`] through the spectral and the Schur route, per grid side.
///
/// The Schur timing covers the decompositions and block plan; the dense
/// matrix used for the agreement check is built outside the clock.
pub fn bench_decompositions(sizes: &[usize], repeats: usize) -> Result<Vec<DecompRow>> {
    bench_decompositions_at(sizes, repeats, BENCH_CUTOFF)
}

/// [`bench_decompositions`] at cutoff `b`. Fails with
/// [`Error::Inconsistent`] where the routes disagree.
pub fn bench_decompositions_at(sizes: &[usize], repeats: usize, b: f64) -> Result<Vec<DecompRow>> {
    if sizes.is_empty() {
        return Err(Error::Empty("sizes"));
    }
    if repeats == 0 {
        return Err(Error::InvalidInput("repeats must be positive".into()));
    }
    for &k in sizes {
        if !(2..=MAX_BENCH_SIDE).contains(&k) {
            return Err(Error::InvalidInput(format!("grid side must lie in [2, {MAX_BENCH_SIDE}], got {k}")));
        }
        if k.pow(4) > MATERIALIZE_LIMIT {
            return Err(Error::SizeGuard {
                size: k.pow(4),
                limit: MATERIALIZE_LIMIT,
            });
        }
    }
    sizes
        .iter()
        .map(|&k| {
            let spec = GroupSpec::cyclic_grid(k, 4)?.equivariant();
            let mut svd_times = Vec::with_capacity(repeats);
            let mut schur_times = Vec::with_capacity(repeats);
            let mut agreement = 0.0f64;
            for _ in 0..repeats {
                let (svd, ts) = timed(|| build_equivariant_projector(&spec, b))?;
                let (schur, tq) = timed(|| SchurProjector::new(&spec, b, Cutoff::Hard))?;
                let gap = (&schur.materialize()?.matrix - &svd.matrix).frobenius_norm()
                    / svd.matrix.frobenius_norm().max(1.0);
                if !(gap <= AGREEMENT_TOL) {
                    return Err(Error::Inconsistent(format!(
                        "grid side {k}: Schur and SVD projectors differ by {gap:.3e}"
                    )));
                }
                agreement = agreement.max(gap);
                svd_times.push(ts);
                schur_times.push(tq);
            }
            let (svd_seconds, schur_seconds) = (median(&svd_times), median(&schur_times));
            Ok(DecompRow {
                size: k,
                svd_seconds,
                schur_seconds,
                ratio: svd_seconds / schur_seconds,
                agreement,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_row() {
        let rows = bench_decompositions(&[3], 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].size, 3);
        assert!(rows[0].agreement <= AGREEMENT_TOL);
        assert!(rows[0].svd_seconds > 0.0 && rows[0].schur_seconds > 0.0);
    }

    #[test]
    fn disagreeing_cutoff_aborts() {
        assert!(matches!(bench_decompositions_at(&[3], 1, 1.5), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(bench_decompositions(&[], 1).is_err());
        assert!(bench_decompositions(&[4], 0).is_err());
        assert!(bench_decompositions(&[15], 1).is_err());
        assert!(matches!(bench_decompositions(&[12], 1), Err(Error::SizeGuard { .. })));
    }
}
