use rand::Rng;
use rand_distr::StandardNormal;

use super::discrete::{cyclic_power, FiniteGroup};
use super::{GroupElement, GroupKind, GroupSpec};
use crate::error::{Error, Result};
use crate::numerics::{expm, DenseMatrix};

/// Part of a group to draw elements from.
#[derive(Debug, Clone, PartialEq)]
pub enum Subset {
    /// The whole group. For `so2`/`so3` this is Haar measure; other
    /// continuous specs draw each coordinate uniformly from `[-r_G, r_G]`.
    Full,
    /// Per-generator coordinate ranges `[lo, hi]` (continuous specs).
    Ranges(Vec<(f64, f64)>),
    /// Allowed canonical words as generator counts (discrete specs).
    Words(Vec<Vec<usize>>),
}

/// Draws an element uniformly from the whole group.
pub fn sample_element<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> Result<GroupElement> {
    sample_element_in(spec, &Subset::Full, rng)
}

/// Draws an element from `subset`.
pub fn sample_element_in<R: Rng + ?Sized>(
    spec: &GroupSpec,
    subset: &Subset,
    rng: &mut R,
) -> Result<GroupElement> {
    if spec.continuous {
        let coords = match subset {
            Subset::Full => full_coords(spec, rng),
            Subset::Ranges(ranges) => range_coords(spec, ranges, rng)?,
            Subset::Words(_) => {
                return Err(Error::InvalidInput(
                    "word subsets apply to discrete groups only".into(),
                ))
            }
        };
        continuous_element(spec, &coords)
    } else {
        match subset {
            Subset::Full => {
                if let Some(n) = spec.kind.cyclic_order() {
                    let j = rng.random_range(0..n);
                    word_element(spec, &[j])
                } else {
                    let group = FiniteGroup::from_spec(spec)?;
                    let g = rng.random_range(0..group.order());
                    Ok(group.elements[g].clone())
                }
            }
            Subset::Words(words) => {
                if words.is_empty() {
                    return Err(Error::Empty("subset"));
                }
                let w = &words[rng.random_range(0..words.len())];
                word_element(spec, w)
            }
            Subset::Ranges(_) => Err(Error::InvalidInput(
                "coordinate ranges apply to continuous groups only".into(),
            )),
        }
    }
}

/// `exp(Σ t_i·dρ(A_i))` on input and output spaces.
pub fn continuous_element(spec: &GroupSpec, coords: &[f64]) -> Result<GroupElement> {
    if coords.len() != spec.n_g() {
        return Err(Error::InvalidInput(format!(
            "{} coordinates for {} generators",
            coords.len(),
            spec.n_g()
        )));
    }
    let combine = |gens: &[DenseMatrix]| {
        let mut acc = DenseMatrix::zeros(gens[0].rows(), gens[0].cols());
        for (g, t) in gens.iter().zip(coords) {
            acc += &g.scale(*t);
        }
        acc
    };
    let matrix_in = expm(&combine(&spec.generators_in))?;
    let matrix_out = match &spec.generators_out {
        Some(out) => Some(expm(&combine(out))?),
        None => None,
    };
    Ok(GroupElement {
        matrix_in,
        matrix_out,
        coords: coords.to_vec(),
    })
}

/// `s_1^{n_1}·s_2^{n_2}⋯` for generator counts `counts`.
pub fn word_element(spec: &GroupSpec, counts: &[usize]) -> Result<GroupElement> {
    if counts.len() != spec.n_g() {
        return Err(Error::InvalidInput(format!(
            "word with {} counts for {} generators",
            counts.len(),
            spec.n_g()
        )));
    }
    if let (Some(n), 1) = (spec.kind.cyclic_order(), spec.n_g()) {
        let group_elems = cyclic_element(spec, counts[0] % n);
        return Ok(GroupElement {
            coords: vec![counts[0] as f64],
            ..group_elems
        });
    }
    let mut m_in = DenseMatrix::identity(spec.d_in());
    let mut m_out = spec
        .generators_out
        .as_ref()
        .map(|_| DenseMatrix::identity(spec.d_out()));
    // rightmost factor acts first: build s_1^{n_1}(s_2^{n_2}(…))
    for (i, &n) in counts.iter().enumerate().rev() {
        let g_in = spec.group_generator_in(i);
        let g_out = m_out.as_ref().map(|_| spec.group_generator_out(i));
        for _ in 0..n {
            m_in = &g_in * &m_in;
            if let (Some(mo), Some(go)) = (m_out.as_mut(), g_out.as_ref()) {
                *mo = go * &*mo;
            }
        }
    }
    Ok(GroupElement {
        matrix_in: m_in,
        matrix_out: m_out,
        coords: counts.iter().map(|c| *c as f64).collect(),
    })
}

fn cyclic_element(spec: &GroupSpec, j: usize) -> GroupElement {
    let matrix_in = cyclic_power(spec, j);
    let matrix_out = match &spec.generators_out {
        Some(out) if *out == spec.generators_in => Some(matrix_in.clone()),
        Some(_) => {
            let r = spec.group_generator_out(0);
            Some((0..j).fold(DenseMatrix::identity(r.rows()), |acc, _| &r * &acc))
        }
        None => None,
    };
    GroupElement {
        matrix_in,
        matrix_out,
        coords: vec![j as f64],
    }
}

fn full_coords<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> Vec<f64> {
    let r = spec.r_g.unwrap_or(std::f64::consts::PI);
    match spec.kind {
        GroupKind::So3 => haar_so3_coords(rng),
        _ => (0..spec.n_g()).map(|_| rng.random_range(-r..=r)).collect(),
    }
}

/// Axis-angle coordinates of a Haar-distributed rotation: uniform axis and
/// angle density `(1 − cos θ)/π` on `[0, π]`.
fn haar_so3_coords<R: Rng + ?Sized>(rng: &mut R) -> Vec<f64> {
    let theta = loop {
        let t: f64 = rng.random_range(0.0..=std::f64::consts::PI);
        let u: f64 = rng.random();
        if 2.0 * u <= 1.0 - t.cos() {
            break t;
        }
    };
    let axis = loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            break [v[0] / n, v[1] / n, v[2] / n];
        }
    };
    axis.iter().map(|a| a * theta).collect()
}

fn range_coords<R: Rng + ?Sized>(spec: &GroupSpec, ranges: &[(f64, f64)], rng: &mut R) -> Result<Vec<f64>> {
    if ranges.is_empty() || ranges.iter().any(|(lo, hi)| lo > hi || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::Empty("subset"));
    }
    if ranges.len() != spec.n_g() {
        return Err(Error::InvalidInput(format!(
            "{} coordinate ranges for {} generators",
            ranges.len(),
            spec.n_g()
        )));
    }
    let r = spec.r_g.unwrap_or(f64::INFINITY) * (1.0 + 1e-12);
    if ranges.iter().any(|(lo, hi)| lo.abs() > r || hi.abs() > r) {
        return Err(Error::InvalidInput(format!(
            "coordinate ranges must lie within [-r_G, r_G] = [-{0}, {0}]",
            spec.r_g.unwrap_or(f64::INFINITY)
        )));
    }
    Ok(ranges
        .iter()
        .map(|&(lo, hi)| if lo == hi { lo } else { rng.random_range(lo..=hi) })
        .collect())
}
