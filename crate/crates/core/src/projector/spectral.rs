use super::{softness_to_cutoff, Cutoff, Projector, ProjectorKind, Route, SpectrumEntry};
use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::numerics::{kron, svd, DenseMatrix};

/// Stacked equivariance constraint `L = [L_1; …; L_k]` with
/// `L_i = dρ_X(A_i)ᵀ ⊗ I_{d′} − I_d ⊗ dρ_Y(A_i)`, so that
/// `L_i·vec(W) = vec(W·dρ_X(A_i) − dρ_Y(A_i)·W)`.
#[derive(Debug, Clone)]
pub struct ConstraintMatrix {
    pub l: DenseMatrix,
    pub per_generator: Vec<DenseMatrix>,
    pub d: usize,
    pub d_prime: usize,
}

pub fn build_constraint(spec: &GroupSpec) -> Result<ConstraintMatrix> {
    spec.validate()?;
    let d = spec.d_in();
    let d_prime = spec.d_out();
    let outs = spec.output_generators();
    let id_in = DenseMatrix::identity(d);
    let id_out = DenseMatrix::identity(d_prime);
    let per_generator: Vec<DenseMatrix> = spec
        .generators_in
        .iter()
        .zip(&outs)
        .map(|(gx, gy)| &kron(&gx.transpose(), &id_out) - &kron(&id_in, gy))
        .collect();
    let refs: Vec<&DenseMatrix> = per_generator.iter().collect();
    let l = DenseMatrix::vstack(&refs)?;
    Ok(ConstraintMatrix {
        l,
        per_generator,
        d,
        d_prime,
    })
}

/// Singular values (ascending) of a constraint and the matching orthonormal
/// directions in weight space. Build once, then cut at any `b`.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub kind: ProjectorKind,
    pub sigma: Vec<f64>,
    /// Column `i` pairs with `sigma[i]`.
    pub vectors: DenseMatrix,
    pub d: usize,
    pub d_prime: usize,
}

impl SpectralBasis {
    /// Left singular vectors of `[dρ(A_1) | … | dρ(A_k)]`.
    pub fn invariant(spec: &GroupSpec) -> Result<Self> {
        spec.validate()?;
        let refs: Vec<&DenseMatrix> = spec.generators_in.iter().collect();
        let s = svd(&DenseMatrix::hstack(&refs)?)?;
        Ok(Self {
            kind: ProjectorKind::Invariant,
            sigma: s.sigma,
            vectors: s.u,
            d: spec.d_in(),
            d_prime: 1,
        })
    }

    /// Right singular vectors of the stacked constraint.
    pub fn equivariant(spec: &GroupSpec) -> Result<Self> {
        let c = build_constraint(spec)?;
        let s = svd(&c.l)?;
        Ok(Self {
            kind: ProjectorKind::Equivariant,
            sigma: s.sigma,
            vectors: s.v,
            d: c.d,
            d_prime: c.d_prime,
        })
    }

    pub fn for_kind(spec: &GroupSpec, kind: ProjectorKind) -> Result<Self> {
        match kind {
            ProjectorKind::Invariant => Self::invariant(spec),
            ProjectorKind::Equivariant => Self::equivariant(spec),
        }
    }

    /// Weight given to a direction with singular value `sigma`.
    pub fn weight(sigma: f64, b: f64, cutoff: Cutoff) -> f64 {
        if sigma < b {
            1.0
        } else {
            match cutoff {
                Cutoff::Hard => 0.0,
                Cutoff::Smooth { s } => (-(sigma * sigma) / (s * s)).exp(),
            }
        }
    }

    /// Hard projector at the cutoff [`softness_to_cutoff`] picks for this
    /// spectrum.
    pub fn at_softness(&self, softness: f64) -> Result<Projector> {
        self.projector(softness_to_cutoff(&self.sigma, softness)?, Cutoff::Hard)
    }

    /// `B = Σ_i γ_i v_i v_iᵀ`.
    pub fn projector(&self, b: f64, cutoff: Cutoff) -> Result<Projector> {
        check_cutoff(b)?;
        cutoff.validate()?;
        let n = self.vectors.rows();
        let gammas: Vec<f64> = self.sigma.iter().map(|&s| Self::weight(s, b, cutoff)).collect();

        let active: Vec<usize> = (0..gammas.len()).filter(|&i| gammas[i] > 0.0).collect();
        let mut scaled = DenseMatrix::zeros(n, active.len());
        for (c, &i) in active.iter().enumerate() {
            let root = gammas[i].sqrt();
            let col: Vec<f64> = self.vectors.column(i).iter().map(|v| v * root).collect();
            scaled.set_column(c, &col);
        }
        let matrix = &scaled * &scaled.transpose();

        let kept: Vec<usize> = (0..gammas.len()).filter(|&i| gammas[i] == 1.0).collect();
        let mut basis = DenseMatrix::zeros(n, kept.len());
        for (c, &i) in kept.iter().enumerate() {
            basis.set_column(c, &self.vectors.column(i));
        }

        Ok(Projector {
            matrix,
            route: match cutoff {
                Cutoff::Hard => Route::SvdHard,
                Cutoff::Smooth { .. } => Route::SvdSmooth,
            },
            kind: self.kind,
            cutoff_b: b,
            smooth_s: cutoff.smooth_s(),
            spectrum: self
                .sigma
                .iter()
                .zip(&gammas)
                .map(|(&sigma, &gamma)| SpectrumEntry { sigma, gamma })
                .collect(),
            basis: Some(basis),
            d: self.d,
            d_prime: self.d_prime,
        })
    }
}

pub(super) fn check_cutoff(b: f64) -> Result<()> {
    if b.is_nan() || b < 0.0 {
        return Err(Error::InvalidInput(format!("cutoff b must be non-negative, got {b}")));
    }
    Ok(())
}

/// Hard invariance projector: keeps left singular directions of the
/// concatenated generators with `σ < b`.
pub fn build_invariant_projector(spec: &GroupSpec, b: f64) -> Result<Projector> {
    SpectralBasis::invariant(spec)?.projector(b, Cutoff::Hard)
}

/// Hard equivariance projector: keeps right singular directions of the
/// stacked constraint with `σ < b`.
pub fn build_equivariant_projector(spec: &GroupSpec, b: f64) -> Result<Projector> {
    SpectralBasis::equivariant(spec)?.projector(b, Cutoff::Hard)
}

/// Smooth-cutoff projector: directions with `σ < b` are kept, the rest are
/// weighted by `exp(−σ²/s²)`. Invariance or equivariance follows from
/// whether `spec` has output generators.
pub fn build_smooth(spec: &GroupSpec, b: f64, s: f64) -> Result<Projector> {
    let kind = if spec.is_invariance() {
        ProjectorKind::Invariant
    } else {
        ProjectorKind::Equivariant
    };
    SpectralBasis::for_kind(spec, kind)?.projector(b, Cutoff::Smooth { s })
}
