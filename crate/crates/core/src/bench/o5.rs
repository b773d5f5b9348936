use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::mlp::{train, Activation, Layer, ProjectedMlp, Targets, TrainConfig};
use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::numerics::DenseMatrix;
use crate::projector::{Projector, SpectralBasis};

/// Width of each point feature.
pub const POINT_DIM: usize = 5;

/// `sin‖x₁‖ − ‖x₂‖³/2 + cos∠(x₁, x₂)` plus `gamma` times a ratio of
/// coordinate magnitudes that breaks rotation invariance.
pub fn o5_target(x1: &[f64], x2: &[f64], gamma: f64, epsilon_den: f64) -> Result<f64> {
    if x1.len() != POINT_DIM || x2.len() != POINT_DIM {
        return Err(Error::InvalidInput(format!(
            "points must have {POINT_DIM} coordinates, got {} and {}",
            x1.len(),
            x2.len()
        )));
    }
    if !(epsilon_den > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon_den}")));
    }
    let n1 = x1.iter().map(|v| v * v).sum::<f64>().sqrt();
    let n2 = x2.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::Degenerate("zero-norm point".into()));
    }
    let dot: f64 = x1.iter().zip(x2).map(|(a, b)| a * b).sum();
    let base = n1.sin() - n2.powi(3) / 2.0 + dot / (n1 * n2);
    let num = x1[0].abs() + x1[1].abs() + x2[0].abs() + x2[1].abs();
    let den = x1[2].abs() + x1[3].abs() + x2[2].abs() + x2[3].abs() + epsilon_den;
    Ok(base + gamma * num / den)
}

/// Rows are `[x₁ | x₂]`.
#[derive(Debug, Clone)]
pub struct O5Split {
    pub inputs: DenseMatrix,
    pub targets: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct O5Task {
    pub gamma: f64,
    pub epsilon_den: f64,
    pub train: O5Split,
    pub test: O5Split,
}

fn o5_split(n: usize, gamma: f64, eps: f64, seed: u64) -> Result<O5Split> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs = DenseMatrix::from_fn(n, 2 * POINT_DIM, |_, _| rng.sample(StandardNormal));
    let targets = (0..n)
        .map(|i| {
            let row = inputs.row(i);
            o5_target(&row[..POINT_DIM], &row[POINT_DIM..], gamma, eps)
        })
        .collect::<Result<_>>()?;
    Ok(O5Split { inputs, targets })
}

impl O5Task {
    /// Standard-normal points; training data from seed `1000 + seed`, test
    /// data from `5000 + seed`.
    pub fn generate(gamma: f64, epsilon_den: f64, n_train: usize, n_test: usize, seed: u64) -> Result<Self> {
        if gamma < 0.0 {
            return Err(Error::InvalidInput(format!("gamma must be non-negative, got {gamma}")));
        }
        Ok(Self {
            gamma,
            epsilon_den,
            train: o5_split(n_train, gamma, epsilon_den, 1000 + seed)?,
            test: o5_split(n_test, gamma, epsilon_den, 5000 + seed)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct O5Config {
    pub gamma: f64,
    pub epsilon_den: f64,
    pub n_train: usize,
    pub n_test: usize,
    /// Hidden widths; each must be a multiple of 5.
    pub hidden: Vec<usize>,
    /// `None` trains a plain MLP.
    pub softness: Option<f64>,
    pub train: TrainConfig,
}

impl Default for O5Config {
    fn default() -> Self {
        Self {
            gamma: 0.3,
            epsilon_den: 0.1,
            n_train: 1024,
            n_test: 512,
            hidden: vec![40, 40],
            softness: Some(0.0),
            train: TrainConfig {
                epochs: 300,
                batch_size: 64,
                learning_rate: 1e-2,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct O5Outcome {
    pub seed: u64,
    pub softness: Option<f64>,
    /// `Σ(ŷ−y)² / Σ(y−ȳ)²` on the test split; NaN if training diverged.
    pub relative_mse: f64,
    pub diverged: bool,
    pub epoch_losses: Vec<f64>,
}

/// `so(5)` acting on both sides of a `5×5` block, cut at `softness`.
pub fn o5_block_projector(softness: f64) -> Result<Projector> {
    let spec = GroupSpec::so_n(POINT_DIM)?.equivariant();
    SpectralBasis::equivariant(&spec)?.at_softness(softness)
}

/// ReLU network `10 → hidden… → 1`. Layers between point-feature spaces
/// are built from projected `5×5` blocks; the readout is free.
pub fn o5_model<R: Rng + ?Sized>(hidden: &[usize], softness: Option<f64>, rng: &mut R) -> Result<ProjectedMlp> {
    if let Some(w) = hidden.iter().find(|w| **w == 0 || *w % POINT_DIM != 0) {
        return Err(Error::InvalidInput(format!("hidden width {w} is not a positive multiple of {POINT_DIM}")));
    }
    let block = softness.map(o5_block_projector).transpose()?;
    let mut dims = vec![2 * POINT_DIM];
    dims.extend_from_slice(hidden);
    let mut layers = Vec::with_capacity(dims.len());
    for w in dims.windows(2) {
        layers.push(Layer::he_init(w[1], w[0], block.clone(), None, Activation::Relu, rng)?);
    }
    layers.push(Layer::he_init(1, *dims.last().expect("input"), None, None, Activation::Identity, rng)?);
    ProjectedMlp::new(layers)
}

/// Trains on standardized targets and scores on the original scale.
pub fn train_o5(task: &O5Task, config: &O5Config, seed: u64) -> Result<O5Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = o5_model(&config.hidden, config.softness, &mut rng)?;

    let y = &task.train.targets;
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let std = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if !(std > 0.0) {
        return Err(Error::Degenerate("constant training targets".into()));
    }
    let standardized: Vec<f64> = y.iter().map(|v| (v - mean) / std).collect();

    let outcome = train(
        &mut model,
        &task.train.inputs,
        Targets::Regression(&standardized),
        &config.train,
        &mut rng,
    )?;
    let relative_mse = if outcome.diverged {
        f64::NAN
    } else {
        let pred = model.forward_batch(&task.test.inputs)?;
        let yt = &task.test.targets;
        let yt_mean = yt.iter().sum::<f64>() / yt.len() as f64;
        let num: f64 = yt.iter().enumerate().map(|(i, v)| (pred[(i, 0)] * std + mean - v).powi(2)).sum();
        let den: f64 = yt.iter().map(|v| (v - yt_mean).powi(2)).sum();
        num / den
    };
    Ok(O5Outcome {
        seed,
        softness: config.softness,
        relative_mse,
        diverged: outcome.diverged,
        epoch_losses: outcome.epoch_losses,
    })
}

/// Generates the task for `seed` and trains one model on it.
pub fn train_projected_mlp(config: &O5Config, seed: u64) -> Result<O5Outcome> {
    let task = O5Task::generate(config.gamma, config.epsilon_den, config.n_train, config.n_test, seed)?;
    train_o5(&task, config, seed)
}

/// Median of the finite values; NaN if there are none.
pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{sample_element, GroupSpec};

    #[test]
    fn target_hand_values() {
        let x = [0.0, 0.0, 1.0, 1.0, 0.0];
        let r2 = 2f64.sqrt();
        let want = r2.sin() - r2.powi(3) / 2.0 + 1.0;
        for gamma in [0.0, 0.3, 5.0] {
            assert!((o5_target(&x, &x, gamma, 0.1).unwrap() - want).abs() < 1e-14);
        }
        let e = [1.0, 0.0, 0.0, 0.0, 0.0];
        let want = 1f64.sin() + 6.5;
        assert!((o5_target(&e, &e, 0.3, 0.1).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn target_rejects_degenerate_points() {
        let z = [0.0; 5];
        let e = [1.0, 0.0, 0.0, 0.0, 0.0];
        assert!(matches!(o5_target(&z, &e, 0.3, 0.1), Err(Error::Degenerate(_))));
        assert!(o5_target(&e, &e, 0.3, 0.0).is_err());
        assert!(o5_target(&e[..4], &e, 0.3, 0.1).is_err());
    }

    #[test]
    fn target_is_invariant_without_gamma() {
        let spec = GroupSpec::so_n(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let mut r = sample_element(&spec, &mut rng).unwrap().matrix_in;
            if rng.random::<bool>() {
                for j in 0..5 {
                    r[(0, j)] = -r[(0, j)];
                }
            }
            let x1: Vec<f64> = (0..5).map(|_| rng.sample(StandardNormal)).collect();
            let x2: Vec<f64> = (0..5).map(|_| rng.sample(StandardNormal)).collect();
            let a = o5_target(&x1, &x2, 0.0, 0.1).unwrap();
            let b = o5_target(&r.matvec(&x1).unwrap(), &r.matvec(&x2).unwrap(), 0.0, 0.1).unwrap();
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn block_projector_keeps_scalar_multiples() {
        let p = o5_block_projector(0.0).unwrap();
        assert_eq!(p.basis.as_ref().unwrap().cols(), 1);
        let w = p.apply(&DenseMatrix::from_fn(5, 5, |i, j| (i * 5 + j) as f64)).unwrap();
        let expect = DenseMatrix::identity(5).scale(12.0);
        assert!((&w - &expect).frobenius_norm() < 1e-10);
    }

    fn short_config(softness: Option<f64>) -> O5Config {
        O5Config {
            n_train: 128,
            n_test: 64,
            hidden: vec![10],
            softness,
            train: TrainConfig {
                epochs: 5,
                batch_size: 32,
                learning_rate: 1e-2,
            },
            ..O5Config::default()
        }
    }

    #[test]
    fn full_softness_matches_plain_training() {
        let plain = train_projected_mlp(&short_config(None), 4).unwrap();
        let soft = train_projected_mlp(&short_config(Some(1.0)), 4).unwrap();
        for (a, b) in plain.epoch_losses.iter().zip(&soft.epoch_losses) {
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
        assert!((plain.relative_mse - soft.relative_mse).abs() <= 1e-10);
    }

    #[test]
    fn training_is_deterministic() {
        let a = train_projected_mlp(&short_config(Some(0.0)), 2).unwrap();
        let b = train_projected_mlp(&short_config(Some(0.0)), 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_is_reported() {
        let mut cfg = short_config(None);
        cfg.train.learning_rate = 1e6;
        let out = train_projected_mlp(&cfg, 0).unwrap();
        assert!(out.diverged);
        assert!(out.relative_mse.is_nan());
    }

    #[test]
    fn rejects_bad_widths() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(o5_model(&[12], Some(0.0), &mut rng).is_err());
    }

    #[test]
    fn median_skips_nan() {
        assert_eq!(median(&[3.0, f64::NAN, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[1.0, 4.0]), 2.5);
        assert!(median(&[f64::NAN]).is_nan());
    }
}
