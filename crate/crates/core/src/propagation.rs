//! Label propagation: the classical anchored diffusion, the inner embedding
//! iteration of the alternating solver, and dense closed-form solutions
//! used to check both.
//!
//! The dense routines build `n × n` systems and refuse graphs above
//! [`DENSE_LIMIT`] nodes; nothing on the production path calls them.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};

use crate::embeddings::{GroundTruth, LabelMatrix, check_simplex, max_abs_diff};
use crate::error::{Error, Result};
use crate::graph::NormalizedView;

/// Largest graph the dense closed-form solvers accept.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationParams {
    /// Mixing weight of the classical LP recursion.
    pub alpha_lp: f64,
    /// Mixing weight of the anchored embedding iteration.
    pub beta: f64,
    pub max_iter: usize,
    /// Early exit once `‖F⁽ᵗ⁾ − F⁽ᵗ⁻¹⁾‖∞ < tol`; 0 disables it.
    pub tol: f64,
}

impl Default for PropagationParams {
    fn default() -> Self {
        Self {
            alpha_lp: 0.99,
            beta: 0.5,
            max_iter: 10,
            tol: 1e-6,
        }
    }
}

impl PropagationParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("alpha_lp", self.alpha_lp), ("beta", self.beta)] {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1), got {value}")));
            }
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter("tol must be non-negative".into()));
        }
        Ok(())
    }
}

/// Diagonals of the fidelity weights `U` and `U_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizerWeights {
    u: Array1<f64>,
    u_alpha: Array1<f64>,
}

impl RegularizerWeights {
    pub fn new(u: Array1<f64>, u_alpha: Array1<f64>) -> Result<Self> {
        if u.len() != u_alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                got: u_alpha.len(),
                context: "U vs U_alpha diagonal length",
            });
        }
        if u.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter("U must have positive finite entries".into()));
        }
        if u_alpha.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter("U_alpha must have non-negative finite entries".into()));
        }
        Ok(Self { u, u_alpha })
    }

    /// Scalar convention: `U′ = (1/β − 1) I` split as `U = (1 − w) U′`,
    /// `U_α = w U′` with `w = α / (1 + α)`.
    pub fn from_scalars(n: usize, beta: f64, alpha: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!("beta must lie in (0, 1), got {beta}")));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be non-negative, got {alpha}")));
        }
        let u_prime = 1.0 / beta - 1.0;
        let w = alpha / (1.0 + alpha);
        Self::new(
            Array1::from_elem(n, (1.0 - w) * u_prime),
            Array1::from_elem(n, w * u_prime),
        )
    }

    /// `U = (1/β − 1) I`, `U_α = 0`.
    pub fn without_classifier(n: usize, beta: f64) -> Result<Self> {
        Self::from_scalars(n, beta, 0.0)
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u(&self) -> &Array1<f64> {
        &self.u
    }

    pub fn u_alpha(&self) -> &Array1<f64> {
        &self.u_alpha
    }

    /// `U′ = U + U_α`.
    pub fn u_prime(&self) -> Array1<f64> {
        &self.u + &self.u_alpha
    }

    /// `U_β = (I + U′)⁻¹`.
    pub fn u_beta(&self) -> Array1<f64> {
        self.u_prime().mapv(|x| 1.0 / (1.0 + x))
    }

    pub fn trace_u_alpha(&self) -> f64 {
        self.u_alpha.sum()
    }
}

/// Labeled rows to reset to their one-hot labels after every step.
#[derive(Debug, Clone, Copy)]
pub struct Clamp<'a> {
    pub nodes: &'a [usize],
    pub truth: &'a GroundTruth,
}

impl Clamp<'_> {
    fn apply(&self, f: &mut Array2<f64>) {
        for (&node, row) in self.nodes.iter().zip(self.truth.onehot().axis_iter(Axis(0))) {
            f.row_mut(node).assign(&row);
        }
    }
}

fn check_rows(view: &NormalizedView, got: usize, context: &'static str) -> Result<()> {
    if got != view.num_nodes() {
        return Err(Error::DimensionMismatch {
            expected: view.num_nodes(),
            got,
            context,
        });
    }
    Ok(())
}

/// `next ← β · Ã · current + (1 − β) · anchor`; returns `‖next − current‖∞`.
fn anchored_step(
    view: &NormalizedView,
    current: &Array2<f64>,
    anchor: ArrayView2<'_, f64>,
    beta: f64,
    next: &mut Array2<f64>,
    keep_isolated: bool,
) -> Result<f64> {
    if keep_isolated {
        view.smooth_into(current.view(), next)?;
    } else {
        view.propagate_into(current.view(), next)?;
    }
    Zip::from(&mut *next).and(&anchor).for_each(|x, &y| {
        *x = beta * *x + (1.0 - beta) * y;
    });
    Ok(max_abs_diff(next.view(), current.view()))
}

/// Classical LP: `F⁽ᵗ⁾ = α Ã F⁽ᵗ⁻¹⁾ + (1 − α) Y` from `F⁽⁰⁾ = Y`.
///
/// `y` has one row per node; unlabeled rows are zero.
pub fn lp_iterate(view: &NormalizedView, y: ArrayView2<'_, f64>, params: &PropagationParams) -> Result<Array2<f64>> {
    params.validate()?;
    check_rows(view, y.nrows(), "label rows vs graph nodes")?;
    let mut current = y.to_owned();
    let mut next = Array2::zeros(current.dim());
    for _ in 0..params.max_iter {
        let change = anchored_step(view, &current, y, params.alpha_lp, &mut next, false)?;
        std::mem::swap(&mut current, &mut next);
        if change < params.tol {
            break;
        }
    }
    Ok(current)
}

/// `(1 − α)(I − αÃ)⁻¹ Y` by dense LU.
pub fn lp_closed_form(view: &NormalizedView, y: ArrayView2<'_, f64>, alpha: f64) -> Result<Array2<f64>> {
    check_rows(view, y.nrows(), "label rows vs graph nodes")?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    let n = view.num_nodes();
    guard_dense(n)?;
    let mut system = view.to_dense() * (-alpha);
    system.diag_mut().mapv_inplace(|x| x + 1.0);
    let rhs = y.to_owned() * (1.0 - alpha);
    dense_solve(system, rhs)
}

/// Anchored embedding iteration `F⁽ᵗ⁾ = β Ã F⁽ᵗ⁻¹⁾ + (1 − β) F_init` from
/// `F⁽⁰⁾ = start`.
///
/// Runs `max_iter` steps unless the change drops below `tol` first.
pub fn lerp_inner_iterate(
    view: &NormalizedView,
    start: &LabelMatrix,
    anchor: &LabelMatrix,
    params: &PropagationParams,
) -> Result<LabelMatrix> {
    lerp_inner_iterate_with(view, start, anchor, params, None, |_, _| {})
}

/// [`lerp_inner_iterate`] with optional clamping of labeled rows and a
/// callback receiving every iterate.
pub fn lerp_inner_iterate_with<F>(
    view: &NormalizedView,
    start: &LabelMatrix,
    anchor: &LabelMatrix,
    params: &PropagationParams,
    clamp: Option<Clamp<'_>>,
    mut on_step: F,
) -> Result<LabelMatrix>
where
    F: FnMut(usize, &Array2<f64>),
{
    params.validate()?;
    check_rows(view, start.num_rows(), "start rows vs graph nodes")?;
    check_rows(view, anchor.num_rows(), "anchor rows vs graph nodes")?;
    check_simplex(start.view())?;
    check_simplex(anchor.view())?;

    let mut current = start.view().to_owned();
    let mut next = Array2::zeros(current.dim());
    for t in 1..=params.max_iter {
        let mut change = anchored_step(view, &current, anchor.view(), params.beta, &mut next, true)?;
        if let Some(clamp) = &clamp {
            clamp.apply(&mut next);
            change = max_abs_diff(next.view(), current.view());
        }
        std::mem::swap(&mut current, &mut next);
        on_step(t, &current);
        if change < params.tol {
            break;
        }
    }
    LabelMatrix::try_new(current)
}

/// Dense solve of `(U + U_α + L̃) F = U F_init + U_α P`.
pub fn general_closed_form(
    view: &NormalizedView,
    weights: &RegularizerWeights,
    f_init: &LabelMatrix,
    classifier_pred: &LabelMatrix,
) -> Result<LabelMatrix> {
    let n = view.num_nodes();
    guard_dense(n)?;
    check_weights(view, weights, f_init, classifier_pred)?;
    let mut system = view.laplacian_dense();
    Zip::from(system.diag_mut())
        .and(weights.u())
        .and(weights.u_alpha())
        .for_each(|d, &u, &ua| *d += u + ua);
    let rhs = fidelity_target(weights, f_init, classifier_pred, false);
    LabelMatrix::try_new(dense_solve(system, rhs)?)
}

/// The literal recursion `F⁽ᵗ⁾ = U_β Ã F⁽ᵗ⁻¹⁾ + (I − U_β) Y′` from
/// `F⁽⁰⁾ = F_init`, where `U′ Y′ = U F_init + U_α P`.
pub fn full_variational_iterate(
    view: &NormalizedView,
    weights: &RegularizerWeights,
    f_init: &LabelMatrix,
    classifier_pred: &LabelMatrix,
    iters: usize,
) -> Result<LabelMatrix> {
    full_variational_iterate_with(view, weights, f_init, classifier_pred, iters, |_, _| {})
}

pub fn full_variational_iterate_with<F>(
    view: &NormalizedView,
    weights: &RegularizerWeights,
    f_init: &LabelMatrix,
    classifier_pred: &LabelMatrix,
    iters: usize,
    mut on_step: F,
) -> Result<LabelMatrix>
where
    F: FnMut(usize, &Array2<f64>),
{
    check_weights(view, weights, f_init, classifier_pred)?;
    check_simplex(f_init.view())?;
    check_simplex(classifier_pred.view())?;
    let target = fidelity_target(weights, f_init, classifier_pred, true);
    let u_beta = weights.u_beta();

    let mut current = f_init.view().to_owned();
    let mut next = Array2::zeros(current.dim());
    for t in 1..=iters {
        view.smooth_into(current.view(), &mut next)?;
        for ((mut row, y), &b) in next.axis_iter_mut(Axis(0)).zip(target.axis_iter(Axis(0))).zip(&u_beta) {
            Zip::from(&mut row).and(&y).for_each(|x, &yv| *x = b * *x + (1.0 - b) * yv);
        }
        std::mem::swap(&mut current, &mut next);
        on_step(t, &current);
    }
    LabelMatrix::try_new(current)
}

fn check_weights(
    view: &NormalizedView,
    weights: &RegularizerWeights,
    f_init: &LabelMatrix,
    classifier_pred: &LabelMatrix,
) -> Result<()> {
    check_rows(view, weights.len(), "regularizer weights vs graph nodes")?;
    check_rows(view, f_init.num_rows(), "F_init rows vs graph nodes")?;
    check_rows(view, classifier_pred.num_rows(), "classifier prediction rows vs graph nodes")?;
    if f_init.num_classes() != classifier_pred.num_classes() {
        return Err(Error::DimensionMismatch {
            expected: f_init.num_classes(),
            got: classifier_pred.num_classes(),
            context: "F_init vs prediction classes",
        });
    }
    Ok(())
}

/// `U F_init + U_α P`, optionally divided row-wise by `U′` to give `Y′`.
fn fidelity_target(
    weights: &RegularizerWeights,
    f_init: &LabelMatrix,
    classifier_pred: &LabelMatrix,
    normalize: bool,
) -> Array2<f64> {
    let mut out = f_init.view().to_owned();
    for (i, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
        let (u, ua) = (weights.u()[i], weights.u_alpha()[i]);
        let scale = if normalize { 1.0 / (u + ua) } else { 1.0 };
        Zip::from(&mut row)
            .and(classifier_pred.row(i))
            .for_each(|x, &p| *x = (u * *x + ua * p) * scale);
    }
    out
}

fn guard_dense(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        return Err(Error::TooLargeForDense { n, limit: DENSE_LIMIT });
    }
    Ok(())
}

/// Solves `A X = B` by LU with partial pivoting.
pub(crate) fn dense_solve(a: Array2<f64>, b: Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    let k = b.ncols();
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| a[[i, j]]);
    let b = nalgebra::DMatrix::from_fn(n, k, |i, j| b[[i, j]]);
    let x = a.lu().solve(&b).ok_or(Error::Singular)?;
    Ok(Array2::from_shape_fn((n, k), |(i, j)| x[(i, j)]))
}
