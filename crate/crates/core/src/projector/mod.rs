//! Weight projectors that trade exact group equivariance for a tunable
//! amount of freedom.
//!
//! Two constructions produce the same operator for normal generators whose
//! block pairs line up with the constraint spectrum:
//!
//! * the spectral route ([`build_invariant_projector`],
//!   [`build_equivariant_projector`], [`build_smooth`]) keeps singular
//!   directions of the generator constraint with `σ < b`;
//! * the Schur route ([`schur_project`], [`SchurProjector`], [`materialize`])
//!   block-diagonalizes the generators and zeroes, symmetrizes or passes each
//!   block of the transformed weight.

mod schur_route;
mod spectral;

use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::groups::GroupSpec;
use crate::numerics::{unvec, vec, DenseMatrix};

pub use schur_route::{
    classify_blocks, materialize, schur_project, sym2, BlockPlan, Cell, CellRule, SchurProjector, MATERIALIZE_LIMIT,
    TOL_EIG,
};
pub use spectral::{
    build_constraint, build_equivariant_projector, build_invariant_projector, build_smooth, ConstraintMatrix,
    SpectralBasis,
};

/// Singular values at or below this are treated as the exactly equivariant core.
pub const NULL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    SvdHard,
    SvdSmooth,
    SchurHard,
    SchurSmooth,
}

impl Route {
    pub fn is_hard(&self) -> bool {
        matches!(self, Route::SvdHard | Route::SchurHard)
    }
}

/// Which constraint a projector enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorKind {
    /// `w ∈ ℝᵈ` with `wᵀρ_X(g) ≈ wᵀ`.
    Invariant,
    /// `W ∈ ℝ^{d′×d}` with `Wρ_X(g) ≈ ρ_Y(g)W`.
    Equivariant,
}

/// Retain/drop rule applied above the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Cutoff {
    Hard,
    /// Exponential attenuation with width `s`.
    Smooth { s: f64 },
}

impl Cutoff {
    pub fn smooth_s(&self) -> Option<f64> {
        match *self {
            Cutoff::Hard => None,
            Cutoff::Smooth { s } => Some(s),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            Cutoff::Smooth { s } if !(s > 0.0 && s.is_finite()) => {
                Err(Error::InvalidInput(format!("smooth width s must be positive, got {s}")))
            }
            _ => Ok(()),
        }
    }
}

/// One singular value (or Schur block eigenvalue sum) and the weight the
/// projector gives its direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub sigma: f64,
    pub gamma: f64,
}

/// An explicit projection operator on flattened weights.
#[derive(Debug, Clone)]
pub struct Projector {
    /// `d×d` (invariance) or `d·d′ × d·d′` acting on column-major `vec(Θ)`.
    pub matrix: DenseMatrix,
    pub route: Route,
    pub kind: ProjectorKind,
    pub cutoff_b: f64,
    pub smooth_s: Option<f64>,
    /// Ascending in `sigma`.
    pub spectrum: Vec<SpectrumEntry>,
    /// Orthonormal columns spanning the fully retained subspace (spectral
    /// routes only).
    pub basis: Option<DenseMatrix>,
    pub d: usize,
    pub d_prime: usize,
}

impl Projector {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Shape `(d′, d)` of the weights this projector acts on.
    pub fn weight_shape(&self) -> (usize, usize) {
        (self.d_prime, self.d)
    }

    /// `Bθ` or `unvec(B·vec(Θ))`; see [`apply_projector`].
    pub fn apply(&self, theta: &DenseMatrix) -> Result<DenseMatrix> {
        apply_projector(self, theta)
    }

    /// Applies `B` to an already flattened weight vector.
    pub fn apply_vec(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.matrix.matvec(theta)
    }
}

/// Construction used to obtain a projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Svd,
    Schur,
}

/// `spec` adjusted to `kind`: invariance drops output generators,
/// equivariance on an invariance spec reuses the input representation.
pub fn spec_for_kind(spec: &GroupSpec, kind: ProjectorKind) -> GroupSpec {
    match kind {
        ProjectorKind::Invariant => GroupSpec {
            generators_out: None,
            ..spec.clone()
        },
        ProjectorKind::Equivariant if spec.is_invariance() => spec.clone().equivariant(),
        ProjectorKind::Equivariant => spec.clone(),
    }
}

/// Dense projector of the requested kind through either route.
pub fn build_projector(
    spec: &GroupSpec,
    kind: ProjectorKind,
    method: Method,
    b: f64,
    cutoff: Cutoff,
) -> Result<Projector> {
    let spec = spec_for_kind(spec, kind);
    match method {
        Method::Svd => SpectralBasis::for_kind(&spec, kind)?.projector(b, cutoff),
        Method::Schur => materialize(&spec, b, cutoff),
    }
}

/// Projects weights: `w = B·θ` for invariance, `W = unvec(B·vec(Θ))` for
/// equivariance.
///
/// `theta` must be `d′×d`; invariance projectors (`d′ = 1`) also accept a
/// `d×1` column and return the same shape.
pub fn apply_projector(p: &Projector, theta: &DenseMatrix) -> Result<DenseMatrix> {
    let (dp, d) = p.weight_shape();
    if p.kind == ProjectorKind::Invariant && theta.shape() == (d, 1) && d != 1 {
        let w = p.matrix.matvec(theta.as_slice())?;
        return Ok(DenseMatrix::column_vector(&w));
    }
    if theta.shape() != (dp, d) {
        return Err(shape_err(
            "apply_projector",
            format!("{dp}x{d}"),
            format!("{}x{}", theta.rows(), theta.cols()),
        ));
    }
    let w = p.matrix.matvec(&vec(theta))?;
    unvec(&w, dp, d)
}

/// Maps a softness fraction in `[0, 1]` to a cutoff for an ascending spectrum.
///
/// Directions with `σ ≤ 1e-10` are always kept; a fraction `softness` of the
/// rest is added in order of increasing `σ`, extended over ties. The cutoff
/// sits halfway between the last kept and first dropped value, so no
/// singular value lies on the boundary.
pub fn softness_to_cutoff(spectrum: &[f64], softness: f64) -> Result<f64> {
    if spectrum.is_empty() {
        return Err(Error::Empty("spectrum"));
    }
    if !(0.0..=1.0).contains(&softness) {
        return Err(Error::InvalidInput(format!("softness must lie in [0, 1], got {softness}")));
    }
    if spectrum.windows(2).any(|w| w[1] < w[0]) || spectrum.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::InvalidInput("spectrum must be finite, non-negative and ascending".into()));
    }
    let len = spectrum.len();
    let n0 = spectrum.iter().filter(|s| **s <= NULL_TOL).count();
    let mut m = n0 + (softness * (len - n0) as f64).round() as usize;
    while m > 0 && m < len && (spectrum[m] - spectrum[m - 1]).abs() <= NULL_TOL {
        m += 1;
    }
    Ok(if m >= len {
        spectrum[len - 1] + 1.0
    } else if m == 0 {
        spectrum[0] / 2.0
    } else {
        0.5 * (spectrum[m - 1] + spectrum[m])
    })
}
