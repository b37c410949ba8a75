//! Multinomial logistic-regression heads trained with weighted soft-target
//! cross-entropy and Adam.
//!
//! A [`Classifier`] holds a `c × (p + 1)` weight matrix: `p` feature columns
//! followed by one bias column. Every objective in this crate is a special
//! case of
//!
//! ```text
//! L(W) = −Σᵢ ωᵢ Σⱼ tᵢⱼ log σ(W xᵢ)ⱼ
//! ```
//!
//! with per-sample weights `ωᵢ` and target distributions `tᵢ`, which is what
//! [`TrainingSet`] stores. Weight decay enters the gradient as `λW`.

use std::io::{BufRead, Write};

use ndarray::{Array1, Array2, ArrayView2, Axis, s};
use rand::Rng;
use rand::seq::SliceRandom;

use crate::embeddings::{GroundTruth, LabelMatrix, log_softmax, sharpen_rows, softmax_in_place};
use crate::error::{Error, Result};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// Optimizer and objective settings for one training call.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Coupled L2 coefficient added to the gradient.
    pub weight_decay: f64,
    pub max_epochs: usize,
    /// Minibatch size; 0 means full batch.
    pub batch_size: usize,
    /// Epochs without validation-loss improvement before stopping.
    pub patience: usize,
    /// Weight of the pseudo-labeled term.
    pub alpha: f64,
    /// Sharpening temperature applied to pseudo-label targets.
    pub temperature: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            weight_decay: 5e-5,
            max_epochs: 1000,
            batch_size: 0,
            patience: 10,
            alpha: 1.0,
            temperature: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidParameter("learning_rate must be positive".into()));
        }
        if self.patience == 0 {
            return Err(Error::InvalidParameter("patience must be at least 1".into()));
        }
        if !(self.weight_decay >= 0.0) || !(self.alpha >= 0.0) {
            return Err(Error::InvalidParameter(
                "weight_decay and alpha must be non-negative".into(),
            ));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::InvalidParameter("temperature must be positive".into()));
        }
        Ok(())
    }
}

/// Adam first/second moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first: Array2<f64>,
    pub second: Array2<f64>,
    pub step: u64,
}

impl AdamState {
    fn zeros(shape: (usize, usize)) -> Self {
        Self {
            first: Array2::zeros(shape),
            second: Array2::zeros(shape),
            step: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    weights: Array2<f64>,
    adam: AdamState,
}

impl Classifier {
    /// Zero-initialized head for `num_features` inputs.
    pub fn zeros(num_classes: usize, num_features: usize) -> Self {
        Self::from_weights(Array2::zeros((num_classes, num_features + 1)))
    }

    /// Wraps an explicit `c × (p + 1)` matrix whose last column is the bias.
    pub fn from_weights(weights: Array2<f64>) -> Self {
        let adam = AdamState::zeros(weights.dim());
        Self { weights, adam }
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn adam(&self) -> &AdamState {
        &self.adam
    }

    pub fn num_classes(&self) -> usize {
        self.weights.nrows()
    }

    /// Feature width `p`, excluding the bias column.
    pub fn num_features(&self) -> usize {
        self.weights.ncols() - 1
    }

    /// Clears the Adam moments, keeping the weights.
    pub fn reset_optimizer(&mut self) {
        self.adam = AdamState::zeros(self.weights.dim());
    }

    pub fn logits(&self, features: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        logits(&self.weights, features)
    }

    /// `σ(X Wᵀ)` row-wise.
    pub fn predict(&self, features: ArrayView2<'_, f64>) -> Result<LabelMatrix> {
        let mut z = self.logits(features)?;
        for row in z.axis_iter_mut(Axis(0)) {
            softmax_in_place(row);
        }
        Ok(LabelMatrix::new_unchecked(z))
    }

    /// Text checkpoint: a `rows cols` header followed by row-major values.
    pub fn write_checkpoint<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.weights.nrows(), self.weights.ncols())?;
        for row in self.weights.axis_iter(Axis(0)) {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_checkpoint<R: BufRead>(input: R) -> Result<Self> {
        let origin = std::path::PathBuf::from("<checkpoint>");
        let bad = |line: usize, message: String| Error::Parse {
            path: origin.clone(),
            line,
            message,
        };
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| bad(1, "missing header".into()))?
            .map_err(|e| Error::io(&origin, e))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse().map_err(|e| bad(1, format!("bad dimension {s:?}: {e}"))))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(bad(1, "header must be `rows cols`".into()));
        };
        if cols == 0 {
            return Err(bad(1, "weight matrix needs a bias column".into()));
        }
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| bad(r + 2, "missing row".into()))?
                .map_err(|e| Error::io(&origin, e))?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|e| bad(r + 2, format!("bad value {s:?}: {e}"))))
                .collect::<Result<_>>()?;
            if row.len() != cols {
                return Err(bad(r + 2, format!("expected {cols} values, got {}", row.len())));
            }
            values.extend(row);
        }
        let weights = Array2::from_shape_vec((rows, cols), values)
            .map_err(|e| bad(0, e.to_string()))?;
        Ok(Self::from_weights(weights))
    }
}

fn logits(weights: &Array2<f64>, features: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let p = weights.ncols() - 1;
    if features.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: features.ncols(),
            context: "classifier feature width",
        });
    }
    let mut z = features.dot(&weights.slice(s![.., ..p]).t());
    z += &weights.column(p);
    Ok(z)
}

/// Rows of a weighted soft-target cross-entropy objective.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    features: Array2<f64>,
    targets: Array2<f64>,
    sample_weights: Array1<f64>,
}

impl TrainingSet {
    pub fn new(features: Array2<f64>, targets: Array2<f64>, sample_weights: Array1<f64>) -> Result<Self> {
        let n = features.nrows();
        for (got, context) in [
            (targets.nrows(), "target rows vs feature rows"),
            (sample_weights.len(), "sample weights vs feature rows"),
        ] {
            if got != n {
                return Err(Error::DimensionMismatch { expected: n, got, context });
            }
        }
        if features.iter().chain(targets.iter()).chain(sample_weights.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("training set"));
        }
        Ok(Self {
            features,
            targets,
            sample_weights,
        })
    }

    /// Mean cross-entropy over labeled rows: weights `1/l`, one-hot targets.
    pub fn supervised(features: ArrayView2<'_, f64>, truth: &GroundTruth) -> Result<Self> {
        if truth.is_empty() {
            return Err(Error::EmptyInput("labeled set"));
        }
        let l = truth.len();
        Self::new(
            features.to_owned(),
            truth.onehot().to_owned(),
            Array1::from_elem(l, 1.0 / l as f64),
        )
    }

    /// Labeled rows with unit weight and one-hot targets plus curriculum rows
    /// with weight `alpha` and sharpened pseudo-label targets.
    ///
    /// `features` and `embeddings` are indexed by node; `labeled[k]` carries
    /// `truth.labels()[k]`.
    pub fn curriculum(
        features: ArrayView2<'_, f64>,
        labeled: &[usize],
        truth: &GroundTruth,
        embeddings: &LabelMatrix,
        curriculum: &[usize],
        alpha: f64,
        temperature: f64,
    ) -> Result<Self> {
        if labeled.len() != truth.len() {
            return Err(Error::DimensionMismatch {
                expected: labeled.len(),
                got: truth.len(),
                context: "labeled nodes vs ground-truth rows",
            });
        }
        let n = features.nrows();
        if embeddings.num_rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: embeddings.num_rows(),
                context: "embedding rows vs feature rows",
            });
        }
        if let Some(&bad) = labeled.iter().chain(curriculum).find(|&&i| i >= n) {
            return Err(Error::NodeOutOfRange { index: bad, n });
        }
        let rows: Vec<usize> = labeled.iter().chain(curriculum).copied().collect();
        let feats = features.select(Axis(0), &rows);
        let mut targets = Array2::zeros((rows.len(), embeddings.num_classes()));
        targets.slice_mut(s![..labeled.len(), ..]).assign(&truth.onehot());
        let pseudo = embeddings.view().select(Axis(0), curriculum);
        targets
            .slice_mut(s![labeled.len().., ..])
            .assign(&sharpen_rows(pseudo.view(), temperature)?);
        let mut weights = Array1::ones(rows.len());
        weights.slice_mut(s![labeled.len()..]).fill(alpha);
        Self::new(feats, targets, weights)
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn targets(&self) -> ArrayView2<'_, f64> {
        self.targets.view()
    }

    pub fn sample_weights(&self) -> &Array1<f64> {
        &self.sample_weights
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            features: self.features.select(Axis(0), rows),
            targets: self.targets.select(Axis(0), rows),
            sample_weights: self.sample_weights.select(Axis(0), rows),
        }
    }
}

/// Weighted cross-entropy `−Σᵢ ωᵢ Σⱼ tᵢⱼ log σ(W xᵢ)ⱼ` (no decay term).
pub fn cross_entropy(weights: &Array2<f64>, set: &TrainingSet) -> Result<f64> {
    let z = logits(weights, set.features())?;
    let mut total = 0.0;
    for ((zi, ti), &wi) in z.axis_iter(Axis(0)).zip(set.targets.axis_iter(Axis(0))).zip(&set.sample_weights) {
        if wi == 0.0 {
            continue;
        }
        total -= wi * ti.dot(&log_softmax(zi));
    }
    Ok(total)
}

/// Cross-entropy and its gradient, the latter including `weight_decay · W`.
pub fn loss_and_grad(weights: &Array2<f64>, set: &TrainingSet, weight_decay: f64) -> Result<(f64, Array2<f64>)> {
    let z = logits(weights, set.features())?;
    let mut residual = Array2::zeros(z.dim());
    let mut total = 0.0;
    for (((zi, ti), &wi), mut ri) in z
        .axis_iter(Axis(0))
        .zip(set.targets.axis_iter(Axis(0)))
        .zip(&set.sample_weights)
        .zip(residual.axis_iter_mut(Axis(0)))
    {
        if wi == 0.0 {
            continue;
        }
        let log_p = log_softmax(zi);
        total -= wi * ti.dot(&log_p);
        // d/dz of −Σⱼ tⱼ log σ(z)ⱼ is (Σⱼ tⱼ) σ(z) − t.
        let mass = ti.sum();
        ri.assign(&(log_p.mapv(f64::exp) * mass - &ti));
        ri *= wi;
    }
    let p = weights.ncols() - 1;
    let mut grad = weights * weight_decay;
    grad.slice_mut(s![.., ..p])
        .scaled_add(1.0, &residual.t().dot(&set.features));
    grad.column_mut(p).scaled_add(1.0, &residual.sum_axis(Axis(0)));
    Ok((total, grad))
}

/// Gradient of the penalized objective `L(W) + ½λ‖W‖²`.
pub fn grad(weights: &Array2<f64>, set: &TrainingSet, weight_decay: f64) -> Result<Array2<f64>> {
    loss_and_grad(weights, set, weight_decay).map(|(_, g)| g)
}

/// Mean cross-entropy over labeled rows of `features`.
pub fn ce_loss_labeled(weights: &Array2<f64>, features: ArrayView2<'_, f64>, truth: &GroundTruth) -> Result<f64> {
    cross_entropy(weights, &TrainingSet::supervised(features, truth)?)
}

/// Labeled term plus `alpha`-weighted sharpened pseudo-label term over the
/// curriculum nodes. Both sums are unnormalized.
#[allow(clippy::too_many_arguments)]
pub fn ce_loss_curriculum(
    weights: &Array2<f64>,
    hop_features: ArrayView2<'_, f64>,
    labeled: &[usize],
    truth: &GroundTruth,
    embeddings: &LabelMatrix,
    curriculum: &[usize],
    alpha: f64,
    temperature: f64,
) -> Result<f64> {
    let set = TrainingSet::curriculum(hop_features, labeled, truth, embeddings, curriculum, alpha, temperature)?;
    cross_entropy(weights, &set)
}

/// One bias-corrected Adam update.
pub fn adam_step(cls: &mut Classifier, gradient: &Array2<f64>, cfg: &TrainConfig) -> Result<()> {
    if gradient.dim() != cls.weights.dim() {
        return Err(Error::DimensionMismatch {
            expected: cls.weights.len(),
            got: gradient.len(),
            context: "gradient shape",
        });
    }
    if gradient.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("gradient"));
    }
    let state = &mut cls.adam;
    state.step += 1;
    let t = state.step as i32;
    let bias1 = 1.0 - ADAM_BETA1.powi(t);
    let bias2 = 1.0 - ADAM_BETA2.powi(t);
    ndarray::Zip::from(&mut cls.weights)
        .and(&mut state.first)
        .and(&mut state.second)
        .and(gradient)
        .for_each(|w, m, v, &g| {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = *m / bias1;
            let v_hat = *v / bias2;
            *w -= cfg.learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
        });
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Cross-entropy over the full training set after the epoch.
    pub train_loss: f64,
    pub validation_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub history: Vec<EpochRecord>,
    /// Epoch whose weights were kept.
    pub best_epoch: usize,
}

impl TrainReport {
    pub fn epochs_run(&self) -> usize {
        self.history.len()
    }
}

/// Runs Adam epochs over `set` until `max_epochs` or until the monitored
/// loss has not improved for `patience` epochs, then restores the best
/// weights.
///
/// The monitored loss is the validation cross-entropy when a non-empty
/// validation set is given, otherwise the training loss. Full-batch epochs
/// (batch size 0 or at least `set.len()`) visit rows in their stored order;
/// minibatch epochs shuffle with `rng`.
pub fn train<R: Rng + ?Sized>(
    cls: &mut Classifier,
    set: &TrainingSet,
    validation: Option<&TrainingSet>,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<TrainReport> {
    cfg.validate()?;
    if set.is_empty() {
        return Err(Error::EmptyInput("training rows"));
    }
    if set.num_features() != cls.num_features() {
        return Err(Error::DimensionMismatch {
            expected: cls.num_features(),
            got: set.num_features(),
            context: "training feature width",
        });
    }
    let validation = validation.filter(|v| !v.is_empty());
    let full_batch = cfg.batch_size == 0 || cfg.batch_size >= set.len();
    let mut order: Vec<usize> = (0..set.len()).collect();

    let mut history = Vec::new();
    let mut best = (f64::INFINITY, cls.weights.clone(), 0usize);
    let mut stale = 0;
    for epoch in 0..cfg.max_epochs {
        if full_batch {
            let g = grad(&cls.weights, set, cfg.weight_decay)?;
            adam_step(cls, &g, cfg)?;
        } else {
            order.shuffle(rng);
            for chunk in order.chunks(cfg.batch_size) {
                let g = grad(&cls.weights, &set.subset(chunk), cfg.weight_decay)?;
                adam_step(cls, &g, cfg)?;
            }
        }

        let train_loss = cross_entropy(&cls.weights, set)?;
        let validation_loss = validation.map(|v| cross_entropy(&cls.weights, v)).transpose()?;
        if !train_loss.is_finite() {
            return Err(Error::NonFinite("training loss"));
        }
        history.push(EpochRecord {
            epoch,
            train_loss,
            validation_loss,
        });

        let monitored = validation_loss.unwrap_or(train_loss);
        if monitored < best.0 {
            best = (monitored, cls.weights.clone(), epoch);
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    let (_, weights, best_epoch) = best;
    if !history.is_empty() {
        cls.weights = weights;
    }
    Ok(TrainReport { history, best_epoch })
}
