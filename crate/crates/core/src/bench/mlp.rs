use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::numerics::DenseMatrix;
use crate::projector::Projector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Identity,
}

/// A dense layer whose weight is `B·θ` applied to every `d′×d` tile of `θ`,
/// and whose bias is optionally projected the same way in chunks.
#[derive(Debug, Clone)]
pub struct Layer {
    pub theta: DenseMatrix,
    pub bias: Vec<f64>,
    pub projector: Option<Projector>,
    pub bias_projector: Option<Projector>,
    pub activation: Activation,
    weight: DenseMatrix,
    bias_eff: Vec<f64>,
}

/// Applies `m` (acting on column-major `vec` of `dp×d` tiles) to every tile
/// of `theta`.
fn project_tiles(m: &DenseMatrix, dp: usize, d: usize, theta: &DenseMatrix) -> DenseMatrix {
    let (nr, nc) = (theta.rows() / dp, theta.cols() / d);
    let mut stacked = DenseMatrix::zeros(dp * d, nr * nc);
    for bi in 0..nr {
        for bj in 0..nc {
            let col = bi * nc + bj;
            for j in 0..d {
                for i in 0..dp {
                    stacked[(j * dp + i, col)] = theta[(bi * dp + i, bj * d + j)];
                }
            }
        }
    }
    let projected = m * &stacked;
    let mut out = DenseMatrix::zeros(theta.rows(), theta.cols());
    for bi in 0..nr {
        for bj in 0..nc {
            let col = bi * nc + bj;
            for j in 0..d {
                for i in 0..dp {
                    out[(bi * dp + i, bj * d + j)] = projected[(j * dp + i, col)];
                }
            }
        }
    }
    out
}

fn project_chunks(m: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    let n = m.rows();
    v.chunks(n).flat_map(|c| m.matvec(c).expect("chunk length")).collect()
}

impl Layer {
    pub fn new(
        theta: DenseMatrix,
        bias: Vec<f64>,
        projector: Option<Projector>,
        bias_projector: Option<Projector>,
        activation: Activation,
    ) -> Result<Self> {
        if bias.len() != theta.rows() {
            return Err(shape_err("Layer::new", format!("bias of length {}", theta.rows()), format!("{}", bias.len())));
        }
        if let Some(p) = &projector {
            let (dp, d) = p.weight_shape();
            if theta.rows() % dp != 0 || theta.cols() % d != 0 {
                return Err(shape_err(
                    "Layer::new",
                    format!("weight tiled by {dp}x{d} blocks"),
                    format!("{}x{}", theta.rows(), theta.cols()),
                ));
            }
        }
        if let Some(p) = &bias_projector {
            if bias.len() % p.dim() != 0 {
                return Err(shape_err(
                    "Layer::new",
                    format!("bias tiled by chunks of {}", p.dim()),
                    format!("{}", bias.len()),
                ));
            }
        }
        let mut layer = Self {
            weight: theta.clone(),
            bias_eff: bias.clone(),
            theta,
            bias,
            projector,
            bias_projector,
            activation,
        };
        layer.refresh();
        Ok(layer)
    }

    /// He-normal `θ` and zero bias.
    pub fn he_init<R: Rng + ?Sized>(
        outputs: usize,
        inputs: usize,
        projector: Option<Projector>,
        bias_projector: Option<Projector>,
        activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        let std = (2.0 / inputs as f64).sqrt();
        let theta = DenseMatrix::from_fn(outputs, inputs, |_, _| std * rng.sample::<f64, _>(StandardNormal));
        Self::new(theta, vec![0.0; outputs], projector, bias_projector, activation)
    }

    /// Recomputes the effective weight and bias from the parameters.
    pub fn refresh(&mut self) {
        self.weight = match &self.projector {
            Some(p) => {
                let (dp, d) = p.weight_shape();
                project_tiles(&p.matrix, dp, d, &self.theta)
            }
            None => self.theta.clone(),
        };
        self.bias_eff = match &self.bias_projector {
            Some(p) => project_chunks(&p.matrix, &self.bias),
            None => self.bias.clone(),
        };
    }

    /// Effective weight `W`.
    pub fn weight(&self) -> &DenseMatrix {
        &self.weight
    }

    pub fn effective_bias(&self) -> &[f64] {
        &self.bias_eff
    }

    pub fn inputs(&self) -> usize {
        self.theta.cols()
    }

    pub fn outputs(&self) -> usize {
        self.theta.rows()
    }

    /// Pulls gradients with respect to `W` and the effective bias back to
    /// the parameters: `∂θ = Bᵀ·∂W` tile-wise.
    fn param_grads(&self, grad_w: DenseMatrix, grad_b: Vec<f64>) -> LayerGrad {
        let theta = match &self.projector {
            Some(p) => {
                let (dp, d) = p.weight_shape();
                project_tiles(&p.matrix.transpose(), dp, d, &grad_w)
            }
            None => grad_w,
        };
        let bias = match &self.bias_projector {
            Some(p) => project_chunks(&p.matrix.transpose(), &grad_b),
            None => grad_b,
        };
        LayerGrad { theta, bias }
    }
}

#[derive(Debug, Clone)]
pub struct LayerGrad {
    pub theta: DenseMatrix,
    pub bias: Vec<f64>,
}

/// Training targets for one batch.
#[derive(Debug, Clone, Copy)]
pub enum Targets<'a> {
    /// Mean squared error against one output.
    Regression(&'a [f64]),
    /// Softmax cross-entropy against class indices.
    Classes(&'a [usize]),
}

impl Targets<'_> {
    fn len(&self) -> usize {
        match self {
            Targets::Regression(y) => y.len(),
            Targets::Classes(c) => c.len(),
        }
    }

    fn select(&self, idx: &[usize]) -> OwnedTargets {
        match self {
            Targets::Regression(y) => OwnedTargets::Regression(idx.iter().map(|&i| y[i]).collect()),
            Targets::Classes(c) => OwnedTargets::Classes(idx.iter().map(|&i| c[i]).collect()),
        }
    }
}

enum OwnedTargets {
    Regression(Vec<f64>),
    Classes(Vec<usize>),
}

impl OwnedTargets {
    fn view(&self) -> Targets<'_> {
        match self {
            OwnedTargets::Regression(y) => Targets::Regression(y),
            OwnedTargets::Classes(c) => Targets::Classes(c),
        }
    }
}

/// Row-wise softmax.
pub fn softmax_rows(z: &DenseMatrix) -> DenseMatrix {
    let mut out = z.clone();
    for i in 0..z.rows() {
        let row = z.row(i);
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = row.iter().map(|v| (v - m).exp()).collect();
        let s: f64 = exps.iter().sum();
        for (j, e) in exps.iter().enumerate() {
            out[(i, j)] = e / s;
        }
    }
    out
}

/// A feed-forward network of [`Layer`]s trained by reparameterization.
#[derive(Debug, Clone)]
pub struct ProjectedMlp {
    pub layers: Vec<Layer>,
}

impl ProjectedMlp {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Empty("layers"));
        }
        for w in layers.windows(2) {
            if w[0].outputs() != w[1].inputs() {
                return Err(shape_err(
                    "ProjectedMlp::new",
                    format!("{} inputs", w[0].outputs()),
                    format!("{}", w[1].inputs()),
                ));
            }
        }
        Ok(Self { layers })
    }

    pub fn inputs(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn outputs(&self) -> usize {
        self.layers.last().expect("non-empty").outputs()
    }

    /// Outputs for a batch (rows of `x`), keeping pre-activations and
    /// activations for back-propagation.
    fn forward_cached(&self, x: &DenseMatrix) -> (Vec<DenseMatrix>, Vec<DenseMatrix>) {
        let mut acts = vec![x.clone()];
        let mut pre = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let mut z = acts.last().expect("input") * &layer.weight.transpose();
            for i in 0..z.rows() {
                for (j, b) in layer.bias_eff.iter().enumerate() {
                    z[(i, j)] += b;
                }
            }
            let a = match layer.activation {
                Activation::Relu => DenseMatrix::from_fn(z.rows(), z.cols(), |i, j| z[(i, j)].max(0.0)),
                Activation::Identity => z.clone(),
            };
            pre.push(z);
            acts.push(a);
        }
        (pre, acts)
    }

    /// Network outputs for each row of `x`.
    pub fn forward_batch(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.cols() != self.inputs() {
            return Err(shape_err("forward", format!("{} features", self.inputs()), format!("{}", x.cols())));
        }
        Ok(self.forward_cached(x).1.pop().expect("output"))
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_batch(&DenseMatrix::new(1, x.len(), x.to_vec())?)?.into_vec())
    }

    /// Class probabilities for one input.
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        let z = self.forward_batch(&DenseMatrix::new(1, x.len(), x.to_vec())?)?;
        Ok(softmax_rows(&z).into_vec())
    }

    /// Mean loss over the batch and parameter gradients.
    pub fn loss_and_grads(&self, x: &DenseMatrix, targets: Targets<'_>) -> Result<(f64, Vec<LayerGrad>)> {
        let n = x.rows();
        if targets.len() != n || n == 0 {
            return Err(shape_err("loss_and_grads", format!("{n} targets"), format!("{}", targets.len())));
        }
        if x.cols() != self.inputs() {
            return Err(shape_err("loss_and_grads", format!("{} features", self.inputs()), format!("{}", x.cols())));
        }
        let (pre, acts) = self.forward_cached(x);
        let out = acts.last().expect("output");
        let (loss, mut delta) = match targets {
            Targets::Regression(y) => {
                if out.cols() != 1 {
                    return Err(Error::InvalidInput("regression needs a single output".into()));
                }
                let mut loss = 0.0;
                let mut d = DenseMatrix::zeros(n, 1);
                for i in 0..n {
                    let r = out[(i, 0)] - y[i];
                    loss += r * r;
                    d[(i, 0)] = 2.0 * r / n as f64;
                }
                (loss / n as f64, d)
            }
            Targets::Classes(c) => {
                let p = softmax_rows(out);
                let mut loss = 0.0;
                let mut d = p.clone();
                for i in 0..n {
                    if c[i] >= p.cols() {
                        return Err(Error::InvalidInput(format!("class {} out of range", c[i])));
                    }
                    loss -= p[(i, c[i])].max(1e-300).ln();
                    d[(i, c[i])] -= 1.0;
                }
                (loss / n as f64, d.scale(1.0 / n as f64))
            }
        };

        let mut grads = Vec::with_capacity(self.layers.len());
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            if layer.activation == Activation::Relu {
                for i in 0..n {
                    for j in 0..delta.cols() {
                        if pre[l][(i, j)] <= 0.0 {
                            delta[(i, j)] = 0.0;
                        }
                    }
                }
            }
            let grad_w = &delta.transpose() * &acts[l];
            let grad_b: Vec<f64> = (0..delta.cols()).map(|j| (0..n).map(|i| delta[(i, j)]).sum()).collect();
            let next = if l > 0 { Some(&delta * &layer.weight) } else { None };
            grads.push(layer.param_grads(grad_w, grad_b));
            if let Some(nd) = next {
                delta = nd;
            }
        }
        grads.reverse();
        Ok((loss, grads))
    }

    /// Plain SGD step on the parameters, then refreshes effective weights.
    pub fn step(&mut self, grads: &[LayerGrad], lr: f64) {
        for (layer, g) in self.layers.iter_mut().zip(grads) {
            layer.theta -= &g.theta.scale(lr);
            layer.bias.iter_mut().zip(&g.bias).for_each(|(b, gb)| *b -= lr * gb);
            layer.refresh();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    /// Mean minibatch loss per epoch.
    pub epoch_losses: Vec<f64>,
    /// The loss became non-finite; training stopped early.
    pub diverged: bool,
}

/// Minibatch SGD over shuffled rows of `x`.
pub fn train<R: Rng + ?Sized>(
    model: &mut ProjectedMlp,
    x: &DenseMatrix,
    targets: Targets<'_>,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<TrainOutcome> {
    if config.batch_size == 0 {
        return Err(Error::InvalidInput("batch size must be positive".into()));
    }
    let n = x.rows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        order.shuffle(rng);
        let mut total = 0.0;
        let mut batches = 0;
        for idx in order.chunks(config.batch_size) {
            let xb = DenseMatrix::from_fn(idx.len(), x.cols(), |i, j| x[(idx[i], j)]);
            let tb = targets.select(idx);
            let (loss, grads) = model.loss_and_grads(&xb, tb.view())?;
            if !loss.is_finite() {
                epoch_losses.push(loss);
                return Ok(TrainOutcome {
                    epoch_losses,
                    diverged: true,
                });
            }
            model.step(&grads, config.learning_rate);
            total += loss;
            batches += 1;
        }
        epoch_losses.push(total / batches as f64);
    }
    Ok(TrainOutcome {
        epoch_losses,
        diverged: false,
    })
}
