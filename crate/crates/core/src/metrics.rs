//! Equivariance residuals, the relative soft-equivariance error, first-order
//! bound checks, and classifier metrics (KL invariance error, combined
//! accuracy).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::groups::{continuous_element, sample_element_in, GroupElement, GroupSpec, Subset};
use crate::numerics::DenseMatrix;

/// Floor applied to `q` inside the KL divergence.
pub const KL_FLOOR: f64 = 1e-12;

/// `W·ρ_X(g)·x − ρ_Y(g)·W·x`, with `ρ_Y = I` when `g` has no output action.
pub fn residual(w: &DenseMatrix, g: &GroupElement, x: &[f64]) -> Result<Vec<f64>> {
    if g.matrix_in.rows() != w.cols() || x.len() != w.cols() {
        return Err(shape_err(
            "residual",
            format!("input of length {}", w.cols()),
            format!("rho_X {}x{}, x of length {}", g.matrix_in.rows(), g.matrix_in.cols(), x.len()),
        ));
    }
    let moved = w.matvec(&g.matrix_in.matvec(x)?)?;
    let wx = w.matvec(x)?;
    let acted = match &g.matrix_out {
        Some(out) if out.rows() == w.rows() => out.matvec(&wx)?,
        Some(out) => {
            return Err(shape_err(
                "residual",
                format!("rho_Y {0}x{0}", w.rows()),
                format!("{}x{}", out.rows(), out.cols()),
            ))
        }
        None => wx,
    };
    Ok(moved.iter().zip(&acted).map(|(a, b)| a - b).collect())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖residual‖ / (‖W‖_F · ‖x‖)`; for a linear layer the Jacobian is `W`.
pub fn relative_error(w: &DenseMatrix, g: &GroupElement, x: &[f64]) -> Result<f64> {
    let denom = w.frobenius_norm() * norm(x);
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::Degenerate("relative error needs ‖W‖_F > 0 and ‖x‖ > 0".into()));
    }
    Ok(norm(&residual(w, g, x)?) / denom)
}

/// Which first-order bound applies to a projected weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Invariant,
    EquivariantSvd,
    EquivariantSchur,
}

/// First-order coefficient of the soft-equivariance bound: `b√n_G·r_G` for
/// invariance and the Schur route, `b√(n_G·d′)·r_G` for the SVD
/// equivariance route. The quadratic remainder is reported separately.
pub fn bound_eta(spec: &GroupSpec, b: f64, kind: BoundKind, d_prime: usize) -> Result<f64> {
    if !spec.continuous {
        return Err(Error::Unsupported(
            "first-order bounds need a continuous group; use the discrete Taylor check".into(),
        ));
    }
    let r_g = spec
        .r_g
        .ok_or_else(|| Error::InvalidInput("continuous spec without r_g".into()))?;
    let n_g = spec.n_g() as f64;
    Ok(match kind {
        BoundKind::Invariant | BoundKind::EquivariantSchur => b * n_g.sqrt() * r_g,
        BoundKind::EquivariantSvd => b * (n_g * d_prime as f64).sqrt() * r_g,
    })
}

/// Settings for [`verify_first_order`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub trials: usize,
    pub t_values: Vec<f64>,
    pub slack: f64,
    pub abs_floor: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            t_values: vec![1e-3, 3e-3, 1e-2],
            slack: 0.05,
            abs_floor: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    /// Lie-algebra coordinates of the element.
    pub coords: Vec<f64>,
    /// `Σ|t_i|`.
    pub t_total: f64,
    pub residual_norm: f64,
    pub relative_error: f64,
    /// Distance of the relative residual from its first-order prediction.
    pub second_order: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub samples: Vec<ErrorSample>,
    pub max_relative: f64,
    /// First-order coefficient from [`bound_eta`].
    pub bound_eta: f64,
    /// Least-squares slope of relative error against `t_total`.
    pub first_order_slope: f64,
    /// Least-squares `c` in `second_order ≈ c·t²`, the `ε_G` estimate.
    pub fitted_quadratic: f64,
    pub pass: bool,
}

/// Checks `relative_error ≤ η_b·Σ|t_i|·(1 + slack) + abs_floor` for small
/// group elements `exp(Σ t_i A_i)`.
///
/// Each trial draws a unit input and a direction on the ℓ1 sphere (so
/// `Σ|t_i| = t`) and evaluates every `t` in the config. Trial `i` uses
/// `weights[i % weights.len()]`.
pub fn verify_first_order<R: Rng + ?Sized>(
    spec: &GroupSpec,
    weights: &[DenseMatrix],
    b: f64,
    kind: BoundKind,
    config: &VerifyConfig,
    rng: &mut R,
) -> Result<ErrorReport> {
    if weights.is_empty() {
        return Err(Error::Empty("weights"));
    }
    if config.t_values.is_empty() || config.trials == 0 {
        return Err(Error::InvalidInput("verification needs trials and t values".into()));
    }
    let d_prime = weights[0].rows();
    let slope = bound_eta(spec, b, kind, d_prime)?;
    let outs = spec.output_generators();
    let n_g = spec.n_g();

    let mut samples = Vec::with_capacity(config.trials * config.t_values.len());
    for trial in 0..config.trials {
        let w = &weights[trial % weights.len()];
        let wn = w.frobenius_norm();
        if !wn.is_finite() {
            return Err(Error::InvalidInput("weight matrix is not finite".into()));
        }
        // the zero map commutes with every group action
        let scale = if wn > 0.0 { 1.0 / wn } else { 0.0 };
        let x = unit_vector(w.cols(), rng);
        let mut dir: Vec<f64> = (0..n_g).map(|_| rng.random_range(-1.0..1.0)).collect();
        let l1: f64 = dir.iter().map(|v| v.abs()).sum();
        if l1 == 0.0 {
            dir[0] = 1.0;
        } else {
            dir.iter_mut().for_each(|v| *v /= l1);
        }
        // first-order residual direction Σ u_i (W dρ_X(A_i) − dρ_Y(A_i) W) x
        let mut lin = vec![0.0; w.rows()];
        for (i, u) in dir.iter().enumerate() {
            let a = w.matvec(&spec.generators_in[i].matvec(&x)?)?;
            let wx = w.matvec(&x)?;
            let bpart = if outs[i].rows() == w.rows() {
                outs[i].matvec(&wx)?
            } else {
                vec![0.0; w.rows()]
            };
            for r in 0..w.rows() {
                lin[r] += u * (a[r] - bpart[r]);
            }
        }
        for &t in &config.t_values {
            let coords: Vec<f64> = dir.iter().map(|u| u * t).collect();
            let g = continuous_element(spec, &coords)?;
            let res = residual(w, &g, &x)?;
            let residual_norm = norm(&res);
            let relative_error = residual_norm * scale;
            let second: Vec<f64> = res.iter().zip(&lin).map(|(r, l)| r - t * l).collect();
            let t_total: f64 = coords.iter().map(|c| c.abs()).sum();
            let bound = slope * t_total * (1.0 + config.slack) + config.abs_floor;
            samples.push(ErrorSample {
                coords,
                t_total,
                residual_norm,
                relative_error,
                second_order: norm(&second) * scale,
                within_bound: relative_error <= bound,
            });
        }
    }

    let max_relative = samples.iter().map(|s| s.relative_error).fold(0.0, f64::max);
    let t2: f64 = samples.iter().map(|s| s.t_total * s.t_total).sum();
    let first_order_slope = samples.iter().map(|s| s.relative_error * s.t_total).sum::<f64>() / t2;
    let t4: f64 = samples.iter().map(|s| s.t_total.powi(4)).sum();
    let fitted_quadratic = samples.iter().map(|s| s.second_order * s.t_total.powi(2)).sum::<f64>() / t4;
    let pass = samples.iter().all(|s| s.within_bound);
    Ok(ErrorReport {
        samples,
        max_relative,
        bound_eta: slope,
        first_order_slope,
        fitted_quadratic,
        pass,
    })
}

fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        let nv = norm(&v);
        if nv > 1e-12 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

fn check_distribution(p: &[f64], name: &str) -> Result<()> {
    if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} has negative or non-finite entries")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("{name} sums to {s}, not 1")));
    }
    Ok(())
}

/// `KL(p ‖ q) = Σ p_i log(p_i / q_i)` with `0·log 0 = 0` and `q` floored at
/// [`KL_FLOOR`].
pub fn kl_invariance_error(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() || p.is_empty() {
        return Err(shape_err("kl_invariance_error", format!("{}", p.len()), format!("{}", q.len())));
    }
    check_distribution(p, "p")?;
    check_distribution(q, "q")?;
    Ok(p
        .iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (pi / qi.max(KL_FLOOR)).ln())
        .sum())
}

/// Mean `KL[F(x) ‖ F(ρ_X(g)x)]` over every input and every listed element.
pub fn invariance_error_over<F>(model: F, inputs: &[Vec<f64>], elements: &[GroupElement]) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if inputs.is_empty() || elements.is_empty() {
        return Err(Error::Empty("inputs or group elements"));
    }
    let mut total = 0.0;
    for x in inputs {
        let p = model(x);
        for g in elements {
            total += kl_invariance_error(&p, &model(&g.matrix_in.matvec(x)?))?;
        }
    }
    Ok(total / (inputs.len() * elements.len()) as f64)
}

/// iErr: mean KL divergence between predictions on `x` and on `ρ_X(g)x`,
/// with `draws` elements sampled from `subset` per input.
pub fn invariance_error<F, R>(
    model: F,
    inputs: &[Vec<f64>],
    spec: &GroupSpec,
    subset: &Subset,
    draws: usize,
    rng: &mut R,
) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
    R: Rng + ?Sized,
{
    if inputs.is_empty() || draws == 0 {
        return Err(Error::Empty("inputs or draws"));
    }
    let mut total = 0.0;
    for x in inputs {
        let p = model(x);
        for _ in 0..draws {
            let g = sample_element_in(spec, subset, rng)?;
            total += kl_invariance_error(&p, &model(&g.matrix_in.matvec(x)?))?;
        }
    }
    Ok(total / (inputs.len() * draws) as f64)
}

/// cAcc: geometric mean of clean and augmented accuracy.
pub fn combined_accuracy(acc: f64, a_acc: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&acc) || !(0.0..=1.0).contains(&a_acc) {
        return Err(Error::InvalidInput(format!(
            "accuracies must lie in [0, 1], got {acc} and {a_acc}"
        )));
    }
    Ok((acc * a_acc).sqrt())
}
