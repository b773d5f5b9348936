use super::spectral::check_cutoff;
use super::{Cutoff, Projector, ProjectorKind, Route, SpectrumEntry};
use crate::error::{shape_err, Error, Result};
use crate::groups::GroupSpec;
use crate::numerics::{schur_normal, unvec, vec, DenseMatrix, SchurForm};

/// Absolute tolerance for matching block eigenvalues.
pub const TOL_EIG: f64 = 1e-8;

/// Largest `d·d′` that [`materialize`] will expand into an explicit matrix.
pub const MATERIALIZE_LIMIT: usize = 10_000;

/// What happens to one block `Θ′_{lk}` of the transformed weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellRule {
    Pass,
    Zero,
    Symmetrize,
    /// `target + γ·(Θ′ − target)`, where the target is `Sym(Θ′)` for
    /// equivalent blocks and zero otherwise.
    Blend { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    /// Output block `T_l` and input block `S_k` share their eigenvalues.
    pub equivalent: bool,
    /// `λ_{S_k} + λ_{T_l}`.
    pub lambda_sum: f64,
    pub rule: CellRule,
}

/// Schur forms of one generator on both sides and the rule for every block
/// pair. `cells[l][k]` pairs output block `l` with input block `k`.
#[derive(Debug, Clone)]
pub struct BlockPlan {
    pub schur_in: SchurForm,
    pub schur_out: SchurForm,
    pub cells: Vec<Vec<Cell>>,
}

/// Assigns a rule to each block pair: blocks with `λ_sum ≤ b` pass; above
/// the cutoff, equivalent pairs are symmetrized and the rest are zeroed
/// (or blended towards those targets with weight `exp(−λ_sum/s²)` in
/// smooth mode).
pub fn classify_blocks(
    schur_in: &SchurForm,
    schur_out: &SchurForm,
    b: f64,
    tol_eig: f64,
    cutoff: Cutoff,
) -> BlockPlan {
    let cells = schur_out
        .blocks
        .iter()
        .map(|t| {
            schur_in
                .blocks
                .iter()
                .map(|s| {
                    let equivalent = t.equivalent(s, tol_eig);
                    let lambda_sum = s.lambda + t.lambda;
                    let rule = if lambda_sum <= b {
                        CellRule::Pass
                    } else {
                        match cutoff {
                            Cutoff::Hard if equivalent => CellRule::Symmetrize,
                            Cutoff::Hard => CellRule::Zero,
                            Cutoff::Smooth { s } => CellRule::Blend {
                                gamma: (-lambda_sum / (s * s)).exp(),
                            },
                        }
                    };
                    Cell {
                        equivalent,
                        lambda_sum,
                        rule,
                    }
                })
                .collect()
        })
        .collect();
    BlockPlan {
        schur_in: schur_in.clone(),
        schur_out: schur_out.clone(),
        cells,
    }
}

/// Nearest rotation-commuting form of a 2×2 block:
/// `[[a, b], [c, d]] ↦ [[(a+d)/2, (b−c)/2], [−(b−c)/2, (a+d)/2]]`.
pub fn sym2(block: &DenseMatrix) -> Result<DenseMatrix> {
    if block.shape() != (2, 2) {
        return Err(shape_err("sym2", "2x2", format!("{}x{}", block.rows(), block.cols())));
    }
    let p = 0.5 * (block[(0, 0)] + block[(1, 1)]);
    let q = 0.5 * (block[(0, 1)] - block[(1, 0)]);
    Ok(DenseMatrix::from_rows(&[[p, q], [-q, p]]))
}

fn commutant_part(cell: &DenseMatrix) -> DenseMatrix {
    if cell.shape() == (2, 2) {
        sym2(cell).expect("2x2 cell")
    } else {
        cell.clone()
    }
}

impl BlockPlan {
    /// `U_Y · rules(U_Yᵀ Θ U_X) · U_Xᵀ`.
    pub fn apply(&self, theta: &DenseMatrix) -> DenseMatrix {
        let uy = &self.schur_out.u;
        let ux = &self.schur_in.u;
        let mut t = &(&uy.transpose() * theta) * ux;
        let in_off = self.schur_in.offsets();
        let out_off = self.schur_out.offsets();
        for (l, row) in self.cells.iter().enumerate() {
            let nr = self.schur_out.blocks[l].size;
            for (k, cell) in row.iter().enumerate() {
                let nc = self.schur_in.blocks[k].size;
                let (r0, c0) = (out_off[l], in_off[k]);
                let new = match cell.rule {
                    CellRule::Pass => continue,
                    CellRule::Zero => DenseMatrix::zeros(nr, nc),
                    CellRule::Symmetrize => commutant_part(&t.block(r0, c0, nr, nc)),
                    CellRule::Blend { gamma } => {
                        let cur = t.block(r0, c0, nr, nc);
                        let target = if cell.equivalent {
                            commutant_part(&cur)
                        } else {
                            DenseMatrix::zeros(nr, nc)
                        };
                        &target + &(&cur - &target).scale(gamma)
                    }
                };
                t.set_block(r0, c0, &new);
            }
        }
        &(uy * &t) * &ux.transpose()
    }

    /// `(λ_sum, γ)` for every coordinate of the transformed weight.
    fn spectrum(&self) -> Vec<SpectrumEntry> {
        let mut out = Vec::new();
        for (l, row) in self.cells.iter().enumerate() {
            let nr = self.schur_out.blocks[l].size;
            for (k, cell) in row.iter().enumerate() {
                let n = nr * self.schur_in.blocks[k].size;
                let sigma = cell.lambda_sum;
                // equivalent cells keep their commutant: 2 of 4 coordinates, or the scalar
                let kept = match (cell.rule, cell.equivalent) {
                    (CellRule::Pass, _) => n,
                    (_, true) if n == 4 => 2,
                    (_, true) => n,
                    _ => 0,
                };
                let gamma_rest = match cell.rule {
                    CellRule::Pass => 1.0,
                    CellRule::Zero | CellRule::Symmetrize => 0.0,
                    CellRule::Blend { gamma } => gamma,
                };
                out.extend((0..kept).map(|_| SpectrumEntry { sigma, gamma: 1.0 }));
                out.extend((kept..n).map(|_| SpectrumEntry {
                    sigma,
                    gamma: gamma_rest,
                }));
            }
        }
        out
    }
}

/// The Schur-route projection with all decompositions precomputed.
///
/// Several generators are combined as `P_1 ∘ P_2 ∘ … ∘ P_k` (the last
/// generator's projection acts first); `sweeps` repeats the whole
/// composition, which tightens the result for non-commuting generators.
#[derive(Debug, Clone)]
pub struct SchurProjector {
    pub plans: Vec<BlockPlan>,
    pub kind: ProjectorKind,
    pub d: usize,
    pub d_prime: usize,
    pub cutoff_b: f64,
    pub cutoff: Cutoff,
    pub sweeps: usize,
}

impl SchurProjector {
    pub fn new(spec: &GroupSpec, b: f64, cutoff: Cutoff) -> Result<Self> {
        check_cutoff(b)?;
        cutoff.validate()?;
        spec.validate()?;
        let outs = spec.output_generators();
        let plans = spec
            .generators_in
            .iter()
            .zip(&outs)
            .map(|(gx, gy)| Ok(classify_blocks(&schur_normal(gx)?, &schur_normal(gy)?, b, TOL_EIG, cutoff)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            plans,
            kind: if spec.is_invariance() {
                ProjectorKind::Invariant
            } else {
                ProjectorKind::Equivariant
            },
            d: spec.d_in(),
            d_prime: spec.d_out(),
            cutoff_b: b,
            cutoff,
            sweeps: 1,
        })
    }

    pub fn with_sweeps(mut self, sweeps: usize) -> Self {
        self.sweeps = sweeps.max(1);
        self
    }

    /// Projects a `d′×d` weight.
    pub fn apply(&self, theta: &DenseMatrix) -> Result<DenseMatrix> {
        if theta.shape() != (self.d_prime, self.d) {
            return Err(shape_err(
                "schur_project",
                format!("{}x{}", self.d_prime, self.d),
                format!("{}x{}", theta.rows(), theta.cols()),
            ));
        }
        let mut w = theta.clone();
        for _ in 0..self.sweeps {
            for plan in self.plans.iter().rev() {
                w = plan.apply(&w);
            }
        }
        Ok(w)
    }

    /// Per-coordinate `(λ_sum, γ)` over every generator, ascending in
    /// `λ_sum`.
    pub fn spectrum(&self) -> Vec<SpectrumEntry> {
        let mut spectrum: Vec<SpectrumEntry> = self.plans.iter().flat_map(|p| p.spectrum()).collect();
        spectrum.sort_by(|a, b| a.sigma.total_cmp(&b.sigma).then(b.gamma.total_cmp(&a.gamma)));
        spectrum
    }

    /// Explicit matrix of `vec(Θ) ↦ vec(W)`.
    pub fn materialize(&self) -> Result<Projector> {
        let n = self.d * self.d_prime;
        if n > MATERIALIZE_LIMIT {
            return Err(Error::SizeGuard {
                size: n,
                limit: MATERIALIZE_LIMIT,
            });
        }
        let mut matrix = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let w = self.apply(&unvec(&e, self.d_prime, self.d)?)?;
            matrix.set_column(j, &vec(&w));
            e[j] = 0.0;
        }
        let spectrum = self.spectrum();
        Ok(Projector {
            matrix,
            route: match self.cutoff {
                Cutoff::Hard => Route::SchurHard,
                Cutoff::Smooth { .. } => Route::SchurSmooth,
            },
            kind: self.kind,
            cutoff_b: self.cutoff_b,
            smooth_s: self.cutoff.smooth_s(),
            spectrum,
            basis: None,
            d: self.d,
            d_prime: self.d_prime,
        })
    }
}

/// Projects `theta` (`d′×d`) through the Schur route.
pub fn schur_project(spec: &GroupSpec, theta: &DenseMatrix, b: f64, cutoff: Cutoff) -> Result<DenseMatrix> {
    SchurProjector::new(spec, b, cutoff)?.apply(theta)
}

/// Builds the explicit `d·d′ × d·d′` matrix of the Schur-route projection.
pub fn materialize(spec: &GroupSpec, b: f64, cutoff: Cutoff) -> Result<Projector> {
    let n = spec.d_in() * spec.d_out();
    if n > MATERIALIZE_LIMIT {
        return Err(Error::SizeGuard {
            size: n,
            limit: MATERIALIZE_LIMIT,
        });
    }
    SchurProjector::new(spec, b, cutoff)?.materialize()
}
