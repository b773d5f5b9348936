use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::mlp::{train, Activation, Layer, ProjectedMlp, Targets, TrainConfig};
use crate::error::{Error, Result};
use crate::groups::{word_element, GroupElement, GroupSpec};
use crate::metrics::{combined_accuracy, invariance_error_over};
use crate::numerics::DenseMatrix;
use crate::projector::{softness_to_cutoff, Cutoff, SpectralBasis};

pub const MIN_GRID_SIDE: usize = 5;
pub const MAX_GRID_SIDE: usize = 12;
pub const DEFAULT_NOISE: f64 = 0.5;
const QUARTER_TURNS: usize = 4;

/// Random binary `k × k` patterns, one per class (row-major pixels).
#[derive(Debug, Clone)]
pub struct GridTemplates {
    pub k: usize,
    pub patterns: Vec<Vec<f64>>,
    rotations: Vec<GroupElement>,
}

#[derive(Debug, Clone)]
pub struct GridDataset {
    pub k: usize,
    pub n_classes: usize,
    /// One flattened sample per row.
    pub inputs: DenseMatrix,
    pub labels: Vec<usize>,
    /// Quarter turns applied to each sample's template.
    pub rotations: Vec<usize>,
}

impl GridDataset {
    pub fn input(&self, i: usize) -> Vec<f64> {
        self.inputs.row(i).to_vec()
    }

    pub fn input_rows(&self) -> Vec<Vec<f64>> {
        (0..self.inputs.rows()).map(|i| self.input(i)).collect()
    }
}

/// The four rotations of a `k × k` grid, identity first.
pub fn quarter_turns(k: usize) -> Result<Vec<GroupElement>> {
    let spec = GroupSpec::cyclic_grid(k, QUARTER_TURNS)?;
    (0..QUARTER_TURNS).map(|j| word_element(&spec, &[j])).collect()
}

impl GridTemplates {
    pub fn random<R: Rng + ?Sized>(k: usize, n_classes: usize, rng: &mut R) -> Result<Self> {
        if !(MIN_GRID_SIDE..=MAX_GRID_SIDE).contains(&k) {
            return Err(Error::InvalidInput(format!(
                "grid side must lie in [{MIN_GRID_SIDE}, {MAX_GRID_SIDE}], got {k}"
            )));
        }
        if n_classes < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 classes, got {n_classes}")));
        }
        let patterns = (0..n_classes)
            .map(|_| (0..k * k).map(|_| if rng.random::<f64>() < 0.4 { 1.0 } else { 0.0 }).collect())
            .collect();
        Ok(Self {
            k,
            patterns,
            rotations: quarter_turns(k)?,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.patterns.len()
    }

    /// Class `i mod n_classes` for sample `i`, rotated by a uniform quarter
    /// turn, plus Gaussian pixel noise.
    pub fn sample<R: Rng + ?Sized>(&self, n_samples: usize, noise: f64, rng: &mut R) -> Result<GridDataset> {
        self.sample_with(n_samples, noise, true, rng)
    }

    /// As [`GridTemplates::sample`]; with `rotate` off every template stays
    /// upright.
    pub fn sample_with<R: Rng + ?Sized>(
        &self,
        n_samples: usize,
        noise: f64,
        rotate: bool,
        rng: &mut R,
    ) -> Result<GridDataset> {
        let d = self.k * self.k;
        let mut inputs = DenseMatrix::zeros(n_samples, d);
        let mut labels = Vec::with_capacity(n_samples);
        let mut rotations = Vec::with_capacity(n_samples);
        for i in 0..n_samples {
            let c = i % self.n_classes();
            let r = if rotate { rng.random_range(0..QUARTER_TURNS) } else { 0 };
            let x = self.rotations[r].matrix_in.matvec(&self.patterns[c])?;
            for (j, v) in x.iter().enumerate() {
                inputs[(i, j)] = v + noise * rng.sample::<f64, _>(StandardNormal);
            }
            labels.push(c);
            rotations.push(r);
        }
        Ok(GridDataset {
            k: self.k,
            n_classes: self.n_classes(),
            inputs,
            labels,
            rotations,
        })
    }
}

/// Noisy rotated patterns from `n_classes` random templates.
pub fn grid_task<R: Rng + ?Sized>(k: usize, n_classes: usize, n_samples: usize, rng: &mut R) -> Result<GridDataset> {
    GridTemplates::random(k, n_classes, rng)?.sample(n_samples, DEFAULT_NOISE, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub k: usize,
    pub n_classes: usize,
    /// Hidden feature maps, each a full `k × k` grid.
    pub channels: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub noise: f64,
    /// Rotate training samples too; by default only the test split is
    /// rotated, so invariance must come from the architecture.
    pub rotate_train: bool,
    pub train: TrainConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            k: 5,
            n_classes: 4,
            channels: 4,
            n_train: 512,
            n_test: 256,
            noise: DEFAULT_NOISE,
            rotate_train: false,
            train: TrainConfig {
                epochs: 30,
                batch_size: 32,
                learning_rate: 0.05,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOutcome {
    pub seed: u64,
    pub softness: f64,
    pub accuracy: f64,
    pub augmented_accuracy: f64,
    pub combined_accuracy: f64,
    /// Mean KL between predictions on each test input and its rotations.
    pub ierr: f64,
    pub diverged: bool,
}

/// `grid → channels × grid → classes`. Hidden tiles are rotation-equivariant
/// maps, the hidden bias and readout rows are rotation-invariant, all cut at
/// `softness`.
pub fn grid_classifier<R: Rng + ?Sized>(
    k: usize,
    n_classes: usize,
    channels: usize,
    softness: f64,
    rng: &mut R,
) -> Result<ProjectedMlp> {
    if channels == 0 {
        return Err(Error::InvalidInput("need at least one channel".into()));
    }
    let inv_spec = GroupSpec::cyclic_grid(k, QUARTER_TURNS)?;
    let eq_spec = inv_spec.clone().equivariant();
    let eq = SpectralBasis::equivariant(&eq_spec)?.at_softness(softness)?;
    let inv = SpectralBasis::invariant(&inv_spec)?.at_softness(softness)?;
    let d = k * k;
    ProjectedMlp::new(vec![
        Layer::he_init(channels * d, d, Some(eq), Some(inv.clone()), Activation::Relu, rng)?,
        Layer::he_init(n_classes, channels * d, Some(inv), None, Activation::Identity, rng)?,
    ])
}

fn accuracy(model: &ProjectedMlp, inputs: &DenseMatrix, labels: &[usize]) -> Result<f64> {
    let logits = model.forward_batch(inputs)?;
    let correct = labels
        .iter()
        .enumerate()
        .filter(|(i, &c)| {
            let row = logits.row(*i);
            let best = (0..row.len()).max_by(|&a, &b| row[a].total_cmp(&row[b])).expect("classes");
            best == c
        })
        .count();
    Ok(correct as f64 / labels.len() as f64)
}

/// Trains one grid classifier and scores accuracy, rotated accuracy and
/// iErr over all quarter turns.
pub fn train_grid(config: &GridConfig, softness: f64, seed: u64) -> Result<GridOutcome> {
    let mut data_rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let templates = GridTemplates::random(config.k, config.n_classes, &mut data_rng)?;
    let train_set = templates.sample_with(config.n_train, config.noise, config.rotate_train, &mut data_rng)?;
    let test_set = templates.sample(config.n_test, config.noise, &mut data_rng)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = grid_classifier(config.k, config.n_classes, config.channels, softness, &mut rng)?;
    let outcome = train(
        &mut model,
        &train_set.inputs,
        Targets::Classes(&train_set.labels),
        &config.train,
        &mut rng,
    )?;
    if outcome.diverged {
        return Ok(GridOutcome {
            seed,
            softness,
            accuracy: f64::NAN,
            augmented_accuracy: f64::NAN,
            combined_accuracy: f64::NAN,
            ierr: f64::NAN,
            diverged: true,
        });
    }

    let turns = quarter_turns(config.k)?;
    let acc = accuracy(&model, &test_set.inputs, &test_set.labels)?;
    let mut rotated = test_set.inputs.clone();
    for i in 0..rotated.rows() {
        let g = &turns[rng.random_range(0..QUARTER_TURNS)];
        let x = g.matrix_in.matvec(test_set.inputs.row(i))?;
        for (j, v) in x.into_iter().enumerate() {
            rotated[(i, j)] = v;
        }
    }
    let a_acc = accuracy(&model, &rotated, &test_set.labels)?;
    let ierr = invariance_error_over(
        |x| model.predict_proba(x).expect("input width"),
        &test_set.input_rows(),
        &turns[1..],
    )?;
    Ok(GridOutcome {
        seed,
        softness,
        accuracy: acc,
        augmented_accuracy: a_acc,
        combined_accuracy: combined_accuracy(acc, a_acc)?,
        ierr,
        diverged: false,
    })
}

/// A random linear filter on a rotated grid, projected at `softness`, with
/// its per-pixel invariance error for each non-trivial rotation.
#[derive(Debug, Clone)]
pub struct FilterPanel {
    pub softness: f64,
    pub cutoff_b: f64,
    /// `k × k` image.
    pub filter: DenseMatrix,
    /// `|ρ(g)ᵀw − w|` as `k × k` images, one per rotation `g ≠ e`.
    pub error_maps: Vec<DenseMatrix>,
}

impl FilterPanel {
    pub fn max_error(&self) -> f64 {
        self.error_maps.iter().map(DenseMatrix::max_abs).fold(0.0, f64::max)
    }
}

/// Projects one random filter at each softness. The same raw filter is used
/// for every panel.
pub fn filter_panels<R: Rng + ?Sized>(
    k: usize,
    n_rot: usize,
    softness: &[f64],
    rng: &mut R,
) -> Result<Vec<FilterPanel>> {
    let spec = GroupSpec::cyclic_grid(k, n_rot)?;
    let basis = SpectralBasis::invariant(&spec)?;
    let raw: Vec<f64> = (0..k * k).map(|_| rng.sample(StandardNormal)).collect();
    let elements: Vec<GroupElement> = (1..n_rot).map(|j| word_element(&spec, &[j])).collect::<Result<_>>()?;
    let to_image = |v: &[f64]| DenseMatrix::new(k, k, v.to_vec());
    softness
        .iter()
        .map(|&s| {
            let b = softness_to_cutoff(&basis.sigma, s)?;
            let p = basis.projector(b, Cutoff::Hard)?;
            let w = p.apply_vec(&raw)?;
            let error_maps = elements
                .iter()
                .map(|g| {
                    let moved = g.matrix_in.tr_matvec(&w)?;
                    let diff: Vec<f64> = moved.iter().zip(&w).map(|(a, b)| (a - b).abs()).collect();
                    to_image(&diff)
                })
                .collect::<Result<_>>()?;
            Ok(FilterPanel {
                softness: s,
                cutoff_b: b,
                filter: to_image(&w)?,
                error_maps,
            })
        })
        .collect()
}
