//! Symmetry-group catalog: Lie-algebra generators, finite generating sets
//! with forward differences, element sampling and grid rotations.
//!
//! A [`GroupSpec`] carries one matrix per generator on the input space, and
//! optionally on the output space. Continuous groups store Lie-algebra
//! representations `dρ(A_i)`; discrete groups store forward differences
//! `Δ_s = ρ(s) − I`, so every projector construction treats both kinds the
//! same way. A missing output list means invariance: the output
//! representation is the trivial one on ℝ.

mod catalog;
mod discrete;
mod grid;
mod sampling;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

pub use catalog::{cyclic_shift, rotation_2d, so2_generator, so3_generators, so_n_generators};
pub use discrete::{discrete_taylor_check, forward_difference, FiniteGroup, TaylorCheck};
pub use grid::{grid_rotation_rep, Interpolation};
pub use sampling::{continuous_element, sample_element, sample_element_in, word_element, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    So2,
    So3,
    SoN { n: usize },
    /// Rotations of a `k × k` grid by multiples of `2π/n_rot`.
    CyclicGrid { k: usize, n_rot: usize },
    /// `C_n` acting on ℝ² by rotations of `2π/n`.
    CyclicVec { n: usize },
    /// `C_n` acting on ℝⁿ by cyclic shifts.
    ShiftCirculant { n: usize },
    Custom,
}

impl GroupKind {
    pub fn name(&self) -> String {
        match self {
            GroupKind::So2 => "so2".into(),
            GroupKind::So3 => "so3".into(),
            GroupKind::SoN { n } => format!("so_n({n})"),
            GroupKind::CyclicGrid { k, n_rot } => format!("cyclic_grid({k},{n_rot})"),
            GroupKind::CyclicVec { n } => format!("cyclic_vec({n})"),
            GroupKind::ShiftCirculant { n } => format!("shift_circulant({n})"),
            GroupKind::Custom => "custom".into(),
        }
    }

    /// Order of the cyclic catalog groups.
    pub fn cyclic_order(&self) -> Option<usize> {
        match *self {
            GroupKind::CyclicGrid { n_rot, .. } => Some(n_rot),
            GroupKind::CyclicVec { n } | GroupKind::ShiftCirculant { n } => Some(n),
            _ => None,
        }
    }
}

/// Description of a symmetry group acting on the input (and optionally the
/// output) of a linear layer.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub continuous: bool,
    /// `dρ_X(A_i)` for continuous groups, `Δ_X(s_i)` for discrete ones.
    pub generators_in: Vec<DenseMatrix>,
    /// `dρ_Y(A_i)` / `Δ_Y(s_i)`; `None` means invariance.
    pub generators_out: Option<Vec<DenseMatrix>>,
    /// Injective radius of the exponential map (continuous groups only).
    pub r_g: Option<f64>,
}

impl GroupSpec {
    /// Planar rotations acting on ℝ².
    pub fn so2() -> Self {
        Self::continuous_catalog(GroupKind::So2, vec![so2_generator()])
    }

    /// 3D rotations acting on ℝ³.
    pub fn so3() -> Self {
        Self::continuous_catalog(GroupKind::So3, so3_generators().to_vec())
    }

    /// Rotation about the z axis only, acting on ℝ³. A one-generator
    /// sub-catalog entry of `so3` (custom kind, `r_G = π`).
    pub fn so3_z() -> Self {
        let [_, _, az] = so3_generators();
        let mut s = Self::continuous_catalog(GroupKind::Custom, vec![az]);
        s.r_g = Some(PI);
        s
    }

    pub fn so_n(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("so(n) needs n >= 2, got {n}")));
        }
        Ok(Self::continuous_catalog(GroupKind::SoN { n }, so_n_generators(n)))
    }

    /// `C_{n_rot}` rotating a `k × k` grid (bilinear interpolation; exact
    /// permutations when `n_rot` divides 4).
    pub fn cyclic_grid(k: usize, n_rot: usize) -> Result<Self> {
        if k < 2 || n_rot < 1 {
            return Err(Error::InvalidInput(format!(
                "cyclic_grid needs k >= 2 and n_rot >= 1, got k={k}, n_rot={n_rot}"
            )));
        }
        let rho = grid_rotation_rep(k, 2.0 * PI / n_rot as f64, Interpolation::Bilinear);
        Ok(Self::discrete_catalog(GroupKind::CyclicGrid { k, n_rot }, &rho))
    }

    pub fn cyclic_vec(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidInput("cyclic_vec needs n >= 1".into()));
        }
        Ok(Self::discrete_catalog(
            GroupKind::CyclicVec { n },
            &rotation_2d(2.0 * PI / n as f64),
        ))
    }

    pub fn shift_circulant(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("shift_circulant needs n >= 2".into()));
        }
        Ok(Self::discrete_catalog(GroupKind::ShiftCirculant { n }, &cyclic_shift(n)))
    }

    /// A user-supplied continuous group; `r_g` is mandatory.
    pub fn custom_continuous(
        generators_in: Vec<DenseMatrix>,
        generators_out: Option<Vec<DenseMatrix>>,
        r_g: f64,
    ) -> Result<Self> {
        let s = Self {
            kind: GroupKind::Custom,
            continuous: true,
            generators_in,
            generators_out,
            r_g: Some(r_g),
        };
        s.validate()?;
        Ok(s)
    }

    /// A user-supplied finite group given by forward differences
    /// `Δ(s_i) = ρ(s_i) − I` of its generating set.
    pub fn custom_discrete(
        differences_in: Vec<DenseMatrix>,
        differences_out: Option<Vec<DenseMatrix>>,
    ) -> Result<Self> {
        let s = Self {
            kind: GroupKind::Custom,
            continuous: false,
            generators_in: differences_in,
            generators_out: differences_out,
            r_g: None,
        };
        s.validate()?;
        Ok(s)
    }

    fn continuous_catalog(kind: GroupKind, gens: Vec<DenseMatrix>) -> Self {
        Self {
            kind,
            continuous: true,
            generators_in: gens,
            generators_out: None,
            r_g: Some(PI),
        }
    }

    fn discrete_catalog(kind: GroupKind, rho: &DenseMatrix) -> Self {
        Self {
            kind,
            continuous: false,
            generators_in: vec![forward_difference(rho).expect("square catalog rep")],
            generators_out: None,
            r_g: None,
        }
    }

    /// Same representation on input and output (equivariant endomorphisms).
    pub fn equivariant(mut self) -> Self {
        self.generators_out = Some(self.generators_in.clone());
        self
    }

    pub fn with_output(mut self, generators_out: Vec<DenseMatrix>) -> Result<Self> {
        self.generators_out = Some(generators_out);
        self.validate()?;
        Ok(self)
    }

    /// Number of generators `n_G`.
    pub fn n_g(&self) -> usize {
        self.generators_in.len()
    }

    pub fn d_in(&self) -> usize {
        self.generators_in.first().map_or(0, |g| g.rows())
    }

    /// Output dimension; 1 for invariance.
    pub fn d_out(&self) -> usize {
        match &self.generators_out {
            Some(g) => g.first().map_or(0, |m| m.rows()),
            None => 1,
        }
    }

    pub fn is_invariance(&self) -> bool {
        self.generators_out.is_none()
    }

    /// Output generators, with the trivial action `[0]` standing in when the
    /// spec describes invariance.
    pub fn output_generators(&self) -> Vec<DenseMatrix> {
        match &self.generators_out {
            Some(g) => g.clone(),
            None => vec![DenseMatrix::zeros(1, 1); self.n_g()],
        }
    }

    /// Group generator `ρ_X(s_i) = Δ_X(s_i) + I` of a discrete spec.
    pub fn group_generator_in(&self, i: usize) -> DenseMatrix {
        &self.generators_in[i] + &DenseMatrix::identity(self.d_in())
    }

    pub fn group_generator_out(&self, i: usize) -> DenseMatrix {
        let out = self.output_generators();
        &out[i] + &DenseMatrix::identity(self.d_out())
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .generators_in
            .first()
            .ok_or(Error::InvalidInput("group spec has no generators".into()))?;
        if !first.is_square() || first.rows() == 0 {
            return Err(Error::InvalidInput("input generators must be square".into()));
        }
        let shape = first.shape();
        if self.generators_in.iter().any(|g| g.shape() != shape || !g.is_finite()) {
            return Err(Error::InvalidInput(
                "input generators must share one square shape and be finite".into(),
            ));
        }
        if let Some(out) = &self.generators_out {
            if out.len() != self.generators_in.len() {
                return Err(Error::InvalidInput(format!(
                    "{} output generators for {} input generators",
                    out.len(),
                    self.generators_in.len()
                )));
            }
            let oshape = out[0].shape();
            if oshape.0 != oshape.1 || oshape.0 == 0 {
                return Err(Error::InvalidInput("output generators must be square".into()));
            }
            if out.iter().any(|g| g.shape() != oshape || !g.is_finite()) {
                return Err(Error::InvalidInput(
                    "output generators must share one square shape and be finite".into(),
                ));
            }
        }
        if self.continuous {
            match self.r_g {
                Some(r) if r > 0.0 && r.is_finite() => {}
                _ => {
                    return Err(Error::InvalidInput(
                        "continuous group specs need a positive injective radius r_g".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

/// A group element acting on input and (optionally) output spaces.
#[derive(Debug, Clone)]
pub struct GroupElement {
    /// `ρ_X(g)`.
    pub matrix_in: DenseMatrix,
    /// `ρ_Y(g)`; `None` for invariance (identity on ℝ).
    pub matrix_out: Option<DenseMatrix>,
    /// Lie-algebra coordinates `t_i`, or generator counts `n_{s_i}` of the
    /// canonical word.
    pub coords: Vec<f64>,
}

impl GroupElement {
    /// `ρ_Y(g)`, falling back to the `dim × dim` identity.
    pub fn out_or_identity(&self, dim: usize) -> DenseMatrix {
        self.matrix_out
            .clone()
            .unwrap_or_else(|| DenseMatrix::identity(dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so2_defaults() {
        let s = GroupSpec::so2();
        assert_eq!(s.n_g(), 1);
        assert_eq!(s.r_g, Some(PI));
        assert!(s.is_invariance());
        assert_eq!(s.d_out(), 1);
        assert_eq!(s.equivariant().d_out(), 2);
    }

    #[test]
    fn custom_continuous_requires_radius() {
        let g = vec![so2_generator()];
        assert!(GroupSpec::custom_continuous(g.clone(), None, 0.0).is_err());
        assert!(GroupSpec::custom_continuous(g, None, PI).is_ok());
    }

    #[test]
    fn validate_rejects_mismatched_generators() {
        let bad = GroupSpec::custom_discrete(
            vec![DenseMatrix::zeros(2, 2), DenseMatrix::zeros(3, 3)],
            None,
        );
        assert!(bad.is_err());
        let bad_out = GroupSpec::so2().with_output(vec![]);
        assert!(bad_out.is_err());
    }

    #[test]
    fn discrete_generator_round_trip() {
        let s = GroupSpec::shift_circulant(5).unwrap();
        assert_eq!(s.group_generator_in(0), cyclic_shift(5));
    }
}
