use std::collections::VecDeque;
use std::f64::consts::PI;

use super::{grid_rotation_rep, rotation_2d, GroupElement, GroupKind, GroupSpec, Interpolation};
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Closure enumeration stops beyond this many elements.
pub const MAX_GROUP_ORDER: usize = 4096;

/// `ρ(s) − I`, the discrete analogue of a Lie-algebra generator.
pub fn forward_difference(rho_s: &DenseMatrix) -> Result<DenseMatrix> {
    if !rho_s.is_square() {
        return Err(Error::InvalidInput(format!(
            "forward difference needs a square matrix, got {}x{}",
            rho_s.rows(),
            rho_s.cols()
        )));
    }
    Ok(rho_s - &DenseMatrix::identity(rho_s.rows()))
}

/// Enumerated finite group with canonical minimal words and the left
/// multiplication table of its generators.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    /// Identity first. `coords` hold the generator counts of the canonical word.
    pub elements: Vec<GroupElement>,
    /// `left_mul[i][g]` is the index of `s_i · g`.
    pub left_mul: Vec<Vec<usize>>,
}

impl FiniteGroup {
    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        if spec.continuous {
            return Err(Error::Unsupported("enumeration of a continuous group".into()));
        }
        spec.validate()?;
        match spec.kind.cyclic_order() {
            Some(n) if spec.n_g() == 1 => Ok(Self::cyclic(spec, n)),
            _ => Self::closure(spec),
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Generator counts `n_{s_i}` of element `g`.
    pub fn word(&self, g: usize) -> Vec<usize> {
        self.elements[g].coords.iter().map(|c| *c as usize).collect()
    }

    /// Word-metric distance `d_S(e, g)`.
    pub fn distance_from_identity(&self, g: usize) -> usize {
        self.word(g).iter().sum()
    }

    /// `C_n` with canonical words `r^j`, `j ∈ [0, n)`.
    fn cyclic(spec: &GroupSpec, n: usize) -> Self {
        let rho_out = spec.generators_out.as_ref().map(|_| spec.group_generator_out(0));
        let same_rep = spec.generators_out.as_ref() == Some(&spec.generators_in);
        let mut out_power = rho_out.as_ref().map(|r| DenseMatrix::identity(r.rows()));
        let mut elements = Vec::with_capacity(n);
        for j in 0..n {
            let matrix_in = cyclic_power(spec, j);
            let matrix_out = if same_rep {
                Some(matrix_in.clone())
            } else {
                out_power.clone()
            };
            elements.push(GroupElement {
                matrix_in,
                matrix_out,
                coords: vec![j as f64],
            });
            if let (Some(p), Some(r)) = (out_power.as_mut(), rho_out.as_ref()) {
                *p = r * &*p;
            }
        }
        let left_mul = vec![(0..n).map(|j| (j + 1) % n).collect()];
        Self { elements, left_mul }
    }

    /// Breadth-first closure under left multiplication by the generators.
    fn closure(spec: &GroupSpec) -> Result<Self> {
        let k = spec.n_g();
        let gens_in: Vec<DenseMatrix> = (0..k).map(|i| spec.group_generator_in(i)).collect();
        let gens_out: Option<Vec<DenseMatrix>> = spec
            .generators_out
            .as_ref()
            .map(|_| (0..k).map(|i| spec.group_generator_out(i)).collect());

        let mut elements = vec![GroupElement {
            matrix_in: DenseMatrix::identity(spec.d_in()),
            matrix_out: gens_out.as_ref().map(|_| DenseMatrix::identity(spec.d_out())),
            coords: vec![0.0; k],
        }];
        let mut left_mul: Vec<Vec<usize>> = vec![Vec::new(); k];
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            for i in 0..k {
                let m_in = &gens_in[i] * &elements[g].matrix_in;
                let m_out = match (&gens_out, &elements[g].matrix_out) {
                    (Some(go), Some(mo)) => Some(&go[i] * mo),
                    _ => None,
                };
                let found = elements.iter().position(|e| {
                    (&e.matrix_in - &m_in).max_abs() < 1e-8
                        && match (&e.matrix_out, &m_out) {
                            (Some(a), Some(b)) => (a - b).max_abs() < 1e-8,
                            _ => true,
                        }
                });
                let idx = match found {
                    Some(idx) => idx,
                    None => {
                        if elements.len() >= MAX_GROUP_ORDER {
                            return Err(Error::Unsupported(format!(
                                "generated group exceeds {MAX_GROUP_ORDER} elements"
                            )));
                        }
                        let mut coords = elements[g].coords.clone();
                        coords[i] += 1.0;
                        elements.push(GroupElement {
                            matrix_in: m_in,
                            matrix_out: m_out,
                            coords,
                        });
                        queue.push_back(elements.len() - 1);
                        elements.len() - 1
                    }
                };
                if left_mul[i].len() <= g {
                    left_mul[i].resize(g + 1, usize::MAX);
                }
                left_mul[i][g] = idx;
            }
        }
        Ok(Self { elements, left_mul })
    }
}

/// `ρ_X(r^j)` for the cyclic catalog groups, computed directly from the
/// angle or shift rather than by repeated products.
pub(super) fn cyclic_power(spec: &GroupSpec, j: usize) -> DenseMatrix {
    match spec.kind {
        GroupKind::CyclicGrid { k, n_rot } => {
            grid_rotation_rep(k, 2.0 * PI * j as f64 / n_rot as f64, Interpolation::Bilinear)
        }
        GroupKind::CyclicVec { n } => rotation_2d(2.0 * PI * j as f64 / n as f64),
        GroupKind::ShiftCirculant { n } => {
            DenseMatrix::from_fn(n, n, |a, b| if (b + j) % n == a { 1.0 } else { 0.0 })
        }
        _ => {
            let r = spec.group_generator_in(0);
            (0..j).fold(DenseMatrix::identity(r.rows()), |acc, _| &r * &acc)
        }
    }
}

/// Result of comparing a function on a finite group against its first-order
/// forward-difference expansion at the identity.
#[derive(Debug, Clone)]
pub struct TaylorCheck {
    /// Lipschitz constant used for the bound (supplied or estimated).
    pub lipschitz: f64,
    /// `|f(g) − f̂(g)|` per element, in enumeration order.
    pub errors: Vec<f64>,
    /// `2h·d_S(e, g)` per element.
    pub bounds: Vec<f64>,
    pub max_error: f64,
    pub max_bound: f64,
    /// Every pointwise error is within its bound.
    pub holds: bool,
}

/// Evaluates `f̂(g) = f(e) + Σ n_{s_i}·Δ_{s_i}f(e)` against the table `f`
/// (indexed like [`FiniteGroup::from_spec`]) and the bound `2h·d_S(e, g)`.
///
/// When `lipschitz` is `None`, `h` is the largest single-generator step
/// `|f(s·g) − f(g)|`, which is the exact Lipschitz constant for a word metric.
pub fn discrete_taylor_check(f: &[f64], spec: &GroupSpec, lipschitz: Option<f64>) -> Result<TaylorCheck> {
    let group = FiniteGroup::from_spec(spec)?;
    if f.len() != group.order() {
        return Err(Error::InvalidInput(format!(
            "function table has {} values for a group of order {}",
            f.len(),
            group.order()
        )));
    }
    let f_e = f[0];
    let deltas: Vec<f64> = group.left_mul.iter().map(|row| f[row[0]] - f_e).collect();
    let h = lipschitz.unwrap_or_else(|| {
        group
            .left_mul
            .iter()
            .flat_map(|row| row.iter().enumerate().map(|(g, &sg)| (f[sg] - f[g]).abs()))
            .fold(0.0, f64::max)
    });

    let mut errors = Vec::with_capacity(f.len());
    let mut bounds = Vec::with_capacity(f.len());
    for (g, value) in f.iter().enumerate() {
        let word = group.word(g);
        let approx = f_e + word.iter().zip(&deltas).map(|(n, d)| *n as f64 * d).sum::<f64>();
        errors.push((value - approx).abs());
        bounds.push(2.0 * h * group.distance_from_identity(g) as f64);
    }
    let holds = errors.iter().zip(&bounds).all(|(e, b)| *e <= b + 1e-12 * (1.0 + b));
    Ok(TaylorCheck {
        lipschitz: h,
        max_error: errors.iter().copied().fold(0.0, f64::max),
        max_bound: bounds.iter().copied().fold(0.0, f64::max),
        errors,
        bounds,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::cyclic_shift;

    #[test]
    fn forward_difference_of_quarter_turn() {
        let d = forward_difference(&rotation_2d(PI / 2.0)).unwrap();
        let expected = DenseMatrix::from_rows(&[[-1.0, -1.0], [1.0, -1.0]]);
        assert!((&d - &expected).max_abs() < 1e-15);
        assert_eq!(forward_difference(&DenseMatrix::identity(3)).unwrap(), DenseMatrix::zeros(3, 3));
        assert!(forward_difference(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn cyclic_enumeration_and_table() {
        let g = FiniteGroup::from_spec(&GroupSpec::shift_circulant(6).unwrap()).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.word(4), vec![4]);
        assert_eq!(g.left_mul[0][5], 0);
        assert_eq!(g.elements[1].matrix_in, cyclic_shift(6));
    }

    #[test]
    fn custom_closure_generates_dihedral_group() {
        // rotation by 90° and a reflection generate D4 (order 8)
        let rot = forward_difference(&rotation_2d(PI / 2.0)).unwrap();
        let refl = forward_difference(&DenseMatrix::diag(&[1.0, -1.0])).unwrap();
        let spec = GroupSpec::custom_discrete(vec![rot, refl], None).unwrap();
        let g = FiniteGroup::from_spec(&spec).unwrap();
        assert_eq!(g.order(), 8);
        for row in &g.left_mul {
            assert_eq!(row.len(), 8);
        }
        assert_eq!(g.distance_from_identity(0), 0);
    }

    #[test]
    fn constant_function_has_zero_error_and_bound() {
        let spec = GroupSpec::shift_circulant(8).unwrap();
        let r = discrete_taylor_check(&[2.5; 8], &spec, None).unwrap();
        assert_eq!(r.max_error, 0.0);
        assert_eq!(r.max_bound, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn linear_in_word_is_exact() {
        let spec = GroupSpec::shift_circulant(8).unwrap();
        let f: Vec<f64> = (0..8).map(|k| k as f64).collect();
        let r = discrete_taylor_check(&f, &spec, None).unwrap();
        assert_eq!(r.max_error, 0.0);
    }

    #[test]
    fn incomplete_table_rejected() {
        let spec = GroupSpec::shift_circulant(8).unwrap();
        assert!(discrete_taylor_check(&[0.0; 7], &spec, None).is_err());
        assert!(discrete_taylor_check(&[0.0; 1], &GroupSpec::so2(), None).is_err());
    }
}
