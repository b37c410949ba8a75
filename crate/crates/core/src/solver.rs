//! The alternating solver.
//!
//! A run has two stages:
//!
//! 1. **Initialization.** Logistic-regression heads are trained on
//!    hop-aggregated node attributes `[X ‖ ÃX ‖ …]` over the labeled nodes;
//!    their averaged prediction is `F_init`.
//! 2. **Alternating rounds.** Each round `r`
//!    (a) runs the anchored embedding iteration
//!        `F ← β Ã F + (1 − β) F_init` for `max_iter` steps,
//!    (b) grows the curriculum to the unlabeled nodes within `r` hops of a
//!        labeled node,
//!    (c) retrains the iteration-stage heads on hop-aggregated embeddings
//!        with ground truth on labeled nodes and sharpened pseudo-labels on
//!        the curriculum, and
//!    (d) replaces `F` by the heads' prediction on the embeddings from (a).
//!
//! With `max_iter = 0` step (a) is the identity ([`Variant::GraphHop`]);
//! [`Variant::LerpV`] keeps only step (a).

use ndarray::{Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classifier::{Classifier, EpochRecord, TrainConfig, TrainingSet, train};
use crate::embeddings::{GroundTruth, LabelMatrix, argmax_rows, one_hot, softmax_rows};
use crate::error::{Error, Result};
use crate::graph::{HopStack, NormalizedView, SparseGraph, hop_aggregate, hop_distances};
use crate::propagation::{Clamp, PropagationParams, RegularizerWeights, lerp_inner_iterate_with};
use crate::data::{Dataset, SplitSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Anchored iteration plus curriculum classifier training.
    #[default]
    Lerp,
    /// No embedding iteration: each round's embeddings are the classifier
    /// prediction alone.
    GraphHop,
    /// No classifier training in the rounds (`U_α = 0`).
    LerpV,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lerp" => Ok(Variant::Lerp),
            "graphhop" => Ok(Variant::GraphHop),
            "lerp-v" | "lerpv" => Ok(Variant::LerpV),
            other => Err(Error::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            Variant::Lerp => "lerp",
            Variant::GraphHop => "graphhop",
            Variant::LerpV => "lerp-v",
        })
    }
}

/// How the classifier heads split the hop stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnsembleMode {
    /// One head per hop `m ∈ 1..=M` on `[S ‖ Ã^m S]`.
    #[default]
    PerHop,
    /// A single head on the full stack `[S ‖ ÃS ‖ … ‖ Ã^M S]`.
    Concatenated,
}

/// How member predictions are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    #[default]
    Probabilities,
    Logits,
}

/// Which unlabeled nodes supply pseudo-labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PseudoLabels {
    /// Nodes within `r` hops of a labeled node at round `r`.
    #[default]
    Curriculum,
    /// Every unlabeled node, every round.
    AllUnlabeled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Hop depth `M`.
    pub hops: usize,
    pub max_round: usize,
    /// Inner embedding iterations per round; forced to 0 for GraphHop.
    pub max_iter: usize,
    /// Pseudo-label weight in the classifier objective.
    pub alpha: f64,
    /// Propagation weight of the embedding iteration.
    pub beta: f64,
    pub temperature: f64,
    pub variant: Variant,
    pub seed: u64,
    pub ensemble: EnsembleMode,
    pub averaging: Averaging,
    pub pseudo_labels: PseudoLabels,
    /// Reset labeled rows to their one-hot labels after each inner step.
    pub clamp_labeled: bool,
    /// Run every round and every inner step; no early exits.
    pub faithful: bool,
    /// Round-level early exit threshold on `‖F_r − F_{r−1}‖∞`.
    pub round_tol: f64,
    /// Inner-iteration early exit threshold.
    pub inner_tol: f64,
    /// Optimizer settings; `alpha`/`temperature` here are overwritten by the
    /// solver-level values.
    pub train: TrainConfig,
    pub minibatch_size: usize,
    /// Full-batch training when the training set is smaller than this.
    pub full_batch_below: usize,
    /// Explicit `(U, U_α)` for the cost monitor; `None` derives them from
    /// `alpha` and `beta`.
    pub cost_weights: Option<RegularizerWeights>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            hops: 2,
            max_round: 100,
            max_iter: 10,
            alpha: 1.0,
            beta: 0.5,
            temperature: 1.0,
            variant: Variant::Lerp,
            seed: 0,
            ensemble: EnsembleMode::PerHop,
            averaging: Averaging::Probabilities,
            pseudo_labels: PseudoLabels::Curriculum,
            clamp_labeled: false,
            faithful: false,
            round_tol: 1e-6,
            inner_tol: 1e-6,
            train: TrainConfig::default(),
            minibatch_size: 64,
            full_batch_below: 64,
            cost_weights: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter(format!("beta must lie in [0, 1), got {}", self.beta)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be non-negative, got {}", self.alpha)));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        self.train.validate()
    }

    /// Inner iteration count after applying the variant.
    pub fn effective_max_iter(&self) -> usize {
        match self.variant {
            Variant::GraphHop => 0,
            _ => self.max_iter,
        }
    }

    fn train_config(&self, num_samples: usize) -> TrainConfig {
        TrainConfig {
            alpha: self.alpha,
            temperature: self.temperature,
            batch_size: if num_samples < self.full_batch_below {
                0
            } else {
                self.minibatch_size
            },
            ..self.train.clone()
        }
    }

    /// `(U, U_α)` used by the cost monitor.
    pub fn regularizer_weights(&self, n: usize) -> Result<RegularizerWeights> {
        if let Some(weights) = &self.cost_weights {
            if weights.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: weights.len(),
                    context: "cost weights vs graph nodes",
                });
            }
            return Ok(weights.clone());
        }
        let beta = if self.beta > 0.0 { self.beta } else { 0.5 };
        match self.variant {
            Variant::LerpV => RegularizerWeights::without_classifier(n, beta),
            _ => RegularizerWeights::from_scalars(n, beta, self.alpha),
        }
    }
}

/// Everything the solver may look at. Test labels are optional so that
/// model selection can run without them.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    pub graph: &'a SparseGraph,
    pub view: NormalizedView,
    pub features: &'a Array2<f64>,
    pub num_classes: usize,
    pub labeled: Vec<usize>,
    pub truth: GroundTruth,
    pub validation: Vec<usize>,
    pub validation_labels: Vec<usize>,
    pub test: Option<(Vec<usize>, Vec<usize>)>,
}

impl<'a> Problem<'a> {
    /// Problem with validation and test labels attached.
    pub fn new(ds: &'a Dataset, split: &SplitSpec) -> Result<Self> {
        let mut problem = Self::without_test(ds, split)?;
        let test_labels = split.test.iter().map(|&i| ds.labels[i]).collect();
        problem.test = Some((split.test.clone(), test_labels));
        Ok(problem)
    }

    /// Problem whose test labels are withheld.
    pub fn without_test(ds: &'a Dataset, split: &SplitSpec) -> Result<Self> {
        let n = ds.num_nodes();
        if let Some(&bad) = split.labeled.iter().chain(&split.validation).chain(&split.test).find(|&&i| i >= n) {
            return Err(Error::NodeOutOfRange { index: bad, n });
        }
        let labels: Vec<usize> = split.labeled.iter().map(|&i| ds.labels[i]).collect();
        Ok(Self {
            graph: &ds.graph,
            view: ds.graph.normalize_random_walk(),
            features: &ds.features,
            num_classes: ds.num_classes,
            labeled: split.labeled.clone(),
            truth: one_hot(&labels, ds.num_classes)?,
            validation: split.validation.clone(),
            validation_labels: split.validation.iter().map(|&i| ds.labels[i]).collect(),
            test: None,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.view.num_nodes()
    }

    fn validation_set(&self, features: &Array2<f64>) -> Result<Option<TrainingSet>> {
        if self.validation.is_empty() {
            return Ok(None);
        }
        let truth = one_hot(&self.validation_labels, self.num_classes)?;
        TrainingSet::supervised(features.select(Axis(0), &self.validation).view(), &truth).map(Some)
    }
}

/// Fraction of `nodes` whose predicted class matches `labels`.
pub fn accuracy(predictions: &[usize], nodes: &[usize], labels: &[usize]) -> f64 {
    if nodes.is_empty() {
        return 0.0;
    }
    let hits = nodes
        .iter()
        .zip(labels)
        .filter(|&(&node, &y)| predictions[node] == y)
        .count();
    hits as f64 / nodes.len() as f64
}

/// Logistic-regression heads over blocks of a hop stack.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(Vec<usize>, Classifier)>,
    averaging: Averaging,
}

impl Ensemble {
    /// Block layout for `hops` and `mode`; `hops = 0` gives one head on the
    /// raw signal.
    pub fn layout(hops: usize, mode: EnsembleMode) -> Vec<Vec<usize>> {
        if hops == 0 {
            return vec![vec![0]];
        }
        match mode {
            EnsembleMode::PerHop => (1..=hops).map(|m| vec![0, m]).collect(),
            EnsembleMode::Concatenated => vec![(0..=hops).collect()],
        }
    }

    /// Zero-initialized heads for a signal with `block_width` columns.
    pub fn zeros(hops: usize, mode: EnsembleMode, averaging: Averaging, num_classes: usize, block_width: usize) -> Self {
        let members = Self::layout(hops, mode)
            .into_iter()
            .map(|blocks| {
                let width = blocks.len() * block_width;
                (blocks, Classifier::zeros(num_classes, width))
            })
            .collect();
        Self { members, averaging }
    }

    /// Ensemble from explicit `(blocks, head)` pairs.
    pub fn from_members(members: Vec<(Vec<usize>, Classifier)>, averaging: Averaging) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyInput("ensemble members"));
        }
        Ok(Self { members, averaging })
    }

    pub fn members(&self) -> impl Iterator<Item = (&[usize], &Classifier)> {
        self.members.iter().map(|(b, c)| (b.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Largest hop any member reads.
    pub fn hops(&self) -> usize {
        self.members.iter().flat_map(|(b, _)| b.iter().copied()).max().unwrap_or(0)
    }

    /// Averaged prediction `σ(F_M Wᵀ)` over all members.
    pub fn predict(&self, stack: &HopStack) -> Result<LabelMatrix> {
        if stack.hops() < self.hops() {
            return Err(Error::DimensionMismatch {
                expected: self.hops(),
                got: stack.hops(),
                context: "hop stack depth vs ensemble",
            });
        }
        let k = self.members.len() as f64;
        let mut total: Option<Array2<f64>> = None;
        for (blocks, cls) in &self.members {
            let features = stack.select_blocks(blocks);
            let part = match self.averaging {
                Averaging::Probabilities => cls.predict(features.view())?.into_inner(),
                Averaging::Logits => cls.logits(features.view())?,
            };
            total = Some(match total {
                None => part,
                Some(acc) => acc + part,
            });
        }
        let total = total.ok_or(Error::EmptyInput("ensemble members"))?;
        Ok(match self.averaging {
            Averaging::Probabilities if self.members.len() == 1 => LabelMatrix::new_unchecked(total),
            Averaging::Probabilities => LabelMatrix::new_unchecked(total / k),
            Averaging::Logits => softmax_rows((total / k).view()),
        })
    }
}

/// Unlabeled nodes within `round` hops of some labeled node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurriculumSet {
    pub members: Vec<usize>,
    pub round: usize,
}

impl CurriculumSet {
    /// Filters precomputed hop distances to the labeled set.
    pub fn from_distances(distances: &[Option<usize>], round: usize) -> Self {
        let members = distances
            .iter()
            .enumerate()
            .filter(|&(_, d)| matches!(d, Some(d) if *d >= 1 && *d <= round))
            .map(|(i, _)| i)
            .collect();
        Self { members, round }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Curriculum at round `round` (starting at 1).
pub fn grow_curriculum(graph: &SparseGraph, labeled: &[usize], round: usize) -> Result<CurriculumSet> {
    if round == 0 {
        return Err(Error::InvalidParameter("curriculum rounds start at 1".into()));
    }
    Ok(CurriculumSet::from_distances(&hop_distances(graph, labeled)?, round))
}

/// Trains the attribute heads on the labeled nodes and returns them with
/// `F_init`.
pub fn init_stage(problem: &Problem<'_>, cfg: &SolverConfig, rng: &mut ChaCha8Rng) -> Result<(Ensemble, LabelMatrix)> {
    let present: std::collections::BTreeSet<usize> = problem.truth.labels().iter().copied().collect();
    let missing: Vec<usize> = (0..problem.num_classes).filter(|c| !present.contains(c)).collect();
    if !missing.is_empty() {
        return Err(Error::DeficientClasses {
            needed: 1,
            classes: missing,
        });
    }
    let stack = hop_aggregate(&problem.view, problem.features.view(), cfg.hops)?;
    let mut ensemble = Ensemble::zeros(
        cfg.hops,
        cfg.ensemble,
        cfg.averaging,
        problem.num_classes,
        problem.features.ncols(),
    );
    let train_cfg = cfg.train_config(problem.labeled.len());
    for (blocks, cls) in &mut ensemble.members {
        let features = stack.select_blocks(blocks);
        let set = TrainingSet::supervised(features.select(Axis(0), &problem.labeled).view(), &problem.truth)?;
        let validation = problem.validation_set(&features)?;
        train(cls, &set, validation.as_ref(), &train_cfg, rng)?;
    }
    let f_init = ensemble.predict(&stack)?;
    Ok((ensemble, f_init))
}

/// Objective value
/// `tr(FᵀL̃F) + tr((F − F_init)ᵀU(F − F_init)) + tr((F − P)ᵀU_α(F − P))`
/// with `P` the ensemble prediction on the hop stack of `F` itself. Without
/// an ensemble the last term is dropped.
pub fn cost_eval(
    view: &NormalizedView,
    weights: &RegularizerWeights,
    f: &LabelMatrix,
    f_init: &LabelMatrix,
    ensemble: Option<&Ensemble>,
) -> Result<f64> {
    crate::embeddings::check_simplex(f.view())?;
    let smooth = view.laplacian_quadratic(f.view())?;
    let weighted_sq = |other: ndarray::ArrayView2<'_, f64>, diag: &ndarray::Array1<f64>| -> f64 {
        f.view()
            .axis_iter(Axis(0))
            .zip(other.axis_iter(Axis(0)))
            .zip(diag)
            .map(|((a, b), &u)| {
                if u == 0.0 {
                    0.0
                } else {
                    u * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
                }
            })
            .sum()
    };
    let mut cost = smooth + weighted_sq(f_init.view(), weights.u());
    if let Some(ensemble) = ensemble {
        let stack = hop_aggregate(view, f.view(), ensemble.hops())?;
        let pred = ensemble.predict(&stack)?;
        cost += weighted_sq(pred.view(), weights.u_alpha());
    }
    Ok(cost)
}

/// Per-round diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub cost: f64,
    pub val_acc: f64,
    pub test_acc: Option<f64>,
    pub curriculum_size: usize,
    /// `‖F_r − F_{r−1}‖∞`.
    pub change: f64,
    /// Worst simplex residual over every embedding produced this round.
    pub simplex_residual: f64,
    pub inner_iterations: usize,
    /// Epoch histories of the iteration-stage heads.
    pub classifier_history: Vec<Vec<EpochRecord>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoundTrace {
    pub init_val_acc: f64,
    pub init_test_acc: Option<f64>,
    pub init_simplex_residual: f64,
    pub rounds: Vec<RoundRecord>,
}

impl RoundTrace {
    pub const CSV_HEADER: &'static str = "round,cost,val_acc,test_acc,curriculum_size";

    /// Writes `round,cost,val_acc,test_acc,curriculum_size`; a withheld test
    /// accuracy is left empty.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rounds {
            let test = r.test_acc.map(|t| t.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", r.round, r.cost, r.val_acc, test, r.curriculum_size)?;
        }
        Ok(())
    }

    /// Worst simplex residual across initialization and all rounds.
    pub fn max_simplex_residual(&self) -> f64 {
        self.rounds
            .iter()
            .map(|r| r.simplex_residual)
            .fold(self.init_simplex_residual, f64::max)
    }

    /// Rounds `r + 1` whose cost exceeds round `r`'s by more than `slack`.
    pub fn descent_violations(&self, slack: f64) -> Vec<usize> {
        self.rounds
            .windows(2)
            .filter(|w| w[1].cost > w[0].cost + slack)
            .map(|w| w[1].round)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    /// Predicted class of every node.
    pub predictions: Vec<usize>,
    pub embeddings: LabelMatrix,
    pub trace: RoundTrace,
    pub val_acc: f64,
    pub test_acc: Option<f64>,
}

/// Stateful driver that exposes each round for inspection.
#[derive(Debug)]
pub struct Solver<'p, 'a> {
    problem: &'p Problem<'a>,
    cfg: SolverConfig,
    rng: ChaCha8Rng,
    distances: Vec<Option<usize>>,
    weights: RegularizerWeights,
    init_ensemble: Option<Ensemble>,
    f_init: Option<LabelMatrix>,
    embeddings: Option<LabelMatrix>,
    ensemble: Option<Ensemble>,
    curriculum: CurriculumSet,
    trace: RoundTrace,
}

impl<'p, 'a> Solver<'p, 'a> {
    pub fn new(problem: &'p Problem<'a>, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if problem.labeled.is_empty() {
            return Err(Error::EmptyInput("labeled set"));
        }
        let distances = hop_distances(problem.graph, &problem.labeled)?;
        let weights = cfg.regularizer_weights(problem.num_nodes())?;
        Ok(Self {
            problem,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
            distances,
            weights,
            init_ensemble: None,
            f_init: None,
            embeddings: None,
            ensemble: None,
            curriculum: CurriculumSet {
                members: Vec::new(),
                round: 0,
            },
            trace: RoundTrace::default(),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn f_init(&self) -> Option<&LabelMatrix> {
        self.f_init.as_ref()
    }

    /// Current embeddings `F`.
    pub fn embeddings(&self) -> Option<&LabelMatrix> {
        self.embeddings.as_ref()
    }

    pub fn init_ensemble(&self) -> Option<&Ensemble> {
        self.init_ensemble.as_ref()
    }

    /// Iteration-stage heads, once the first round has trained them.
    pub fn ensemble(&self) -> Option<&Ensemble> {
        self.ensemble.as_ref()
    }

    pub fn curriculum(&self) -> &CurriculumSet {
        &self.curriculum
    }

    pub fn trace(&self) -> &RoundTrace {
        &self.trace
    }

    pub fn regularizer_weights(&self) -> &RegularizerWeights {
        &self.weights
    }

    fn accuracies(&self, f: &LabelMatrix) -> (f64, Option<f64>) {
        let predictions = argmax_rows(f.view());
        let val = accuracy(&predictions, &self.problem.validation, &self.problem.validation_labels);
        let test = self
            .problem
            .test
            .as_ref()
            .map(|(nodes, labels)| accuracy(&predictions, nodes, labels));
        (val, test)
    }

    /// Runs the initialization stage.
    pub fn initialize(&mut self) -> Result<()> {
        let (ensemble, f_init) = init_stage(self.problem, &self.cfg, &mut self.rng)?;
        let (val, test) = self.accuracies(&f_init);
        self.trace.init_val_acc = val;
        self.trace.init_test_acc = test;
        self.trace.init_simplex_residual = f_init.simplex_residual();
        self.init_ensemble = Some(ensemble);
        self.embeddings = Some(f_init.clone());
        self.f_init = Some(f_init);
        Ok(())
    }

    /// One alternating round; initializes first if needed.
    pub fn step(&mut self) -> Result<&RoundRecord> {
        if self.f_init.is_none() {
            self.initialize()?;
        }
        let round = self.trace.rounds.len() + 1;
        let problem = self.problem;
        let (f_init, previous) = match (&self.f_init, &self.embeddings) {
            (Some(a), Some(b)) => (a, b),
            _ => unreachable!("initialized above"),
        };

        // (a) anchored embedding iteration
        let params = PropagationParams {
            beta: self.cfg.beta,
            max_iter: self.cfg.effective_max_iter(),
            tol: if self.cfg.faithful { 0.0 } else { self.cfg.inner_tol },
            ..PropagationParams::default()
        };
        let clamp = self.cfg.clamp_labeled.then_some(Clamp {
            nodes: &problem.labeled,
            truth: &problem.truth,
        });
        let mut residual: f64 = 0.0;
        let mut inner_iterations = 0;
        let iterated = lerp_inner_iterate_with(&problem.view, previous, f_init, &params, clamp, |t, f| {
            inner_iterations = t;
            residual = residual.max(crate::embeddings::simplex_residual(f.view()));
        })?;

        // (b) curriculum
        self.curriculum = match self.cfg.pseudo_labels {
            PseudoLabels::Curriculum => CurriculumSet::from_distances(&self.distances, round),
            PseudoLabels::AllUnlabeled => {
                let mut is_labeled = vec![false; problem.num_nodes()];
                problem.labeled.iter().for_each(|&i| is_labeled[i] = true);
                CurriculumSet {
                    members: (0..problem.num_nodes()).filter(|&i| !is_labeled[i]).collect(),
                    round,
                }
            }
        };

        let mut classifier_history = Vec::new();
        let updated = if self.cfg.variant == Variant::LerpV {
            iterated
        } else {
            // (c) classifier update on labeled + curriculum nodes
            let stack = hop_aggregate(&problem.view, iterated.view(), self.cfg.hops)?;
            let ensemble = self.ensemble.get_or_insert_with(|| {
                Ensemble::zeros(
                    self.cfg.hops,
                    self.cfg.ensemble,
                    self.cfg.averaging,
                    problem.num_classes,
                    problem.num_classes,
                )
            });
            let train_cfg = self.cfg.train_config(problem.labeled.len() + self.curriculum.len());
            for (blocks, cls) in &mut ensemble.members {
                let features = stack.select_blocks(blocks);
                let set = TrainingSet::curriculum(
                    features.view(),
                    &problem.labeled,
                    &problem.truth,
                    &iterated,
                    &self.curriculum.members,
                    self.cfg.alpha,
                    self.cfg.temperature,
                )?;
                let validation = problem.validation_set(&features)?;
                cls.reset_optimizer();
                let report = train(cls, &set, validation.as_ref(), &train_cfg, &mut self.rng)?;
                classifier_history.push(report.history);
            }
            // (d) embeddings from the retrained heads
            ensemble.predict(&stack)?
        };
        residual = residual.max(updated.simplex_residual());
        crate::embeddings::check_simplex(updated.view())?;

        let change = updated.max_abs_diff(previous);
        let cost = cost_eval(&problem.view, &self.weights, &updated, f_init, self.ensemble.as_ref())?;
        let (val_acc, test_acc) = self.accuracies(&updated);
        self.embeddings = Some(updated);
        self.trace.rounds.push(RoundRecord {
            round,
            cost,
            val_acc,
            test_acc,
            curriculum_size: self.curriculum.len(),
            change,
            simplex_residual: residual,
            inner_iterations,
            classifier_history,
        });
        Ok(self.trace.rounds.last().expect("just pushed"))
    }

    /// Initialization followed by up to `max_round` rounds.
    pub fn run(mut self) -> Result<Outcome> {
        if self.f_init.is_none() {
            self.initialize()?;
        }
        while self.trace.rounds.len() < self.cfg.max_round {
            let change = self.step()?.change;
            if !self.cfg.faithful && change < self.cfg.round_tol {
                break;
            }
        }
        let embeddings = self.embeddings.take().expect("initialized");
        let predictions = argmax_rows(embeddings.view());
        let (val_acc, test_acc) = self.accuracies(&embeddings);
        Ok(Outcome {
            predictions,
            embeddings,
            trace: self.trace,
            val_acc,
            test_acc,
        })
    }
}

/// Convenience wrapper: initialization plus alternating rounds.
pub fn run(problem: &Problem<'_>, cfg: &SolverConfig) -> Result<Outcome> {
    Solver::new(problem, cfg.clone())?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_blobs, sample_split};

    fn chain(n: usize) -> SparseGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        SparseGraph::from_unweighted_edges(n, &edges).unwrap()
    }

    #[test]
    fn curriculum_on_chain() {
        let g = chain(4);
        assert_eq!(grow_curriculum(&g, &[0], 1).unwrap().members, vec![1]);
        assert_eq!(grow_curriculum(&g, &[0], 2).unwrap().members, vec![1, 2]);
        assert_eq!(grow_curriculum(&g, &[0], 10).unwrap().members, vec![1, 2, 3]);
        assert!(grow_curriculum(&g, &[0], 0).is_err());
    }

    #[test]
    fn curriculum_skips_unreachable_nodes() {
        let g = SparseGraph::from_unweighted_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(grow_curriculum(&g, &[0], 50).unwrap().members, vec![1]);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("lerp".parse::<Variant>().unwrap(), Variant::Lerp);
        assert_eq!("GraphHop".parse::<Variant>().unwrap(), Variant::GraphHop);
        assert_eq!("lerp-v".parse::<Variant>().unwrap(), Variant::LerpV);
        assert!("gcn".parse::<Variant>().is_err());
        assert_eq!(Variant::LerpV.to_string(), "lerp-v");
    }

    #[test]
    fn ensemble_layouts() {
        assert_eq!(Ensemble::layout(0, EnsembleMode::PerHop), vec![vec![0]]);
        assert_eq!(Ensemble::layout(2, EnsembleMode::PerHop), vec![vec![0, 1], vec![0, 2]]);
        assert_eq!(Ensemble::layout(2, EnsembleMode::Concatenated), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn zero_rounds_return_initial_prediction() {
        let ds = make_blobs(15, 3, 4, 6.0, 2).unwrap();
        let split = sample_split(&ds, 1, 0).unwrap();
        let problem = Problem::new(&ds, &split).unwrap();
        let cfg = SolverConfig {
            max_round: 0,
            ..Default::default()
        };
        let mut solver = Solver::new(&problem, cfg.clone()).unwrap();
        solver.initialize().unwrap();
        let expected = argmax_rows(solver.f_init().unwrap().view());
        let outcome = run(&problem, &cfg).unwrap();
        assert_eq!(outcome.predictions, expected);
        assert!(outcome.trace.rounds.is_empty());
    }

    #[test]
    fn missing_class_is_rejected() {
        let ds = make_blobs(10, 2, 2, 6.0, 0).unwrap();
        let split = SplitSpec {
            labeled: vec![0, 1],
            validation: vec![],
            test: (2..20).collect(),
            labels_per_class: 1,
            seed: 0,
        };
        let problem = Problem::new(&ds, &split).unwrap();
        let mut solver = Solver::new(&problem, SolverConfig::default()).unwrap();
        assert!(matches!(solver.initialize(), Err(Error::DeficientClasses { .. })));
    }

    #[test]
    fn trace_csv_layout() {
        let trace = RoundTrace {
            rounds: vec![RoundRecord {
                round: 1,
                cost: 2.5,
                val_acc: 0.5,
                test_acc: None,
                curriculum_size: 4,
                change: 0.1,
                simplex_residual: 0.0,
                inner_iterations: 3,
                classifier_history: vec![],
            }],
            ..Default::default()
        };
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "round,cost,val_acc,test_acc,curriculum_size\n1,2.5,0.5,,4\n"
        );
    }
}
