//! Row-stochastic label matrices and the transforms applied to them.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut1, Axis};

use crate::error::{Error, Result};

/// Tolerance on `|Σⱼ fᵢⱼ − 1|` and on negative entries.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Dense `n × c` matrix whose rows are probability distributions over
/// classes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix(Array2<f64>);

impl LabelMatrix {
    /// Wraps `values` after checking every row against the simplex.
    pub fn try_new(values: Array2<f64>) -> Result<Self> {
        check_simplex(values.view())?;
        Ok(Self(values))
    }

    /// Uniform distribution on every row.
    pub fn uniform(n: usize, c: usize) -> Self {
        Self(Array2::from_elem((n, c), 1.0 / c as f64))
    }

    pub(crate) fn new_unchecked(values: Array2<f64>) -> Self {
        Self(values)
    }

    pub fn num_rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.0.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.0.row(i)
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Largest simplex residual: `max(max |row sum − 1|, max(−entry, 0))`.
    pub fn simplex_residual(&self) -> f64 {
        simplex_residual(self.0.view())
    }

    /// Max-norm distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &LabelMatrix) -> f64 {
        max_abs_diff(self.0.view(), other.0.view())
    }
}

impl AsRef<Array2<f64>> for LabelMatrix {
    fn as_ref(&self) -> &Array2<f64> {
        &self.0
    }
}

/// One-hot rows for the labeled nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    onehot: Array2<f64>,
    labels: Vec<usize>,
}

impl GroundTruth {
    pub fn onehot(&self) -> ArrayView2<'_, f64> {
        self.onehot.view()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.onehot.ncols()
    }
}

pub fn simplex_residual(values: ArrayView2<'_, f64>) -> f64 {
    values
        .axis_iter(Axis(0))
        .map(|row| {
            let sum_err = (row.sum() - 1.0).abs();
            let neg = row.iter().fold(0.0f64, |m, &x| m.max(-x));
            if sum_err.is_nan() { f64::INFINITY } else { sum_err.max(neg) }
        })
        .fold(0.0, f64::max)
}

/// Errors on the first row that is off the simplex.
pub fn check_simplex(values: ArrayView2<'_, f64>) -> Result<()> {
    for (i, row) in values.axis_iter(Axis(0)).enumerate() {
        let sum = row.sum();
        let min = row.iter().copied().fold(f64::INFINITY, f64::min);
        if !((sum - 1.0).abs() <= SIMPLEX_TOL && min >= -SIMPLEX_TOL) {
            return Err(Error::SimplexViolation { row: i, sum, min });
        }
    }
    Ok(())
}

pub(crate) fn max_abs_diff(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// In-place max-shifted softmax of one row.
pub(crate) fn softmax_in_place(mut row: ArrayViewMut1<'_, f64>) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    row.mapv_inplace(|z| (z - max).exp());
    let total = row.sum();
    row.mapv_inplace(|e| e / total);
}

/// `log σ(z)` for one row, computed with the log-sum-exp shift.
pub(crate) fn log_softmax(row: ArrayView1<'_, f64>) -> Array1<f64> {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + row.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    row.mapv(|z| z - lse)
}

/// Row-wise softmax.
pub fn softmax_rows(logits: ArrayView2<'_, f64>) -> LabelMatrix {
    let mut out = logits.to_owned();
    for row in out.axis_iter_mut(Axis(0)) {
        softmax_in_place(row);
    }
    LabelMatrix(out)
}

/// Temperature sharpening `zᵢ^{1/T} / Σⱼ zⱼ^{1/T}`.
pub fn sharpen(dist: ArrayView1<'_, f64>, temperature: f64) -> Result<Array1<f64>> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sharpening temperature must be positive, got {temperature}"
        )));
    }
    if temperature == 1.0 {
        return Ok(dist.to_owned());
    }
    // Working relative to the row max keeps z^{1/T} representable for small T.
    let max = dist.iter().copied().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return Err(Error::InvalidParameter("cannot sharpen an all-zero row".into()));
    }
    let inv_t = 1.0 / temperature;
    let powered = dist.mapv(|z| (z / max).powf(inv_t));
    let total = powered.sum();
    Ok(powered / total)
}

/// Sharpens every row of `f`.
pub fn sharpen_rows(f: ArrayView2<'_, f64>, temperature: f64) -> Result<Array2<f64>> {
    let mut out = Array2::zeros(f.raw_dim());
    for (src, mut dst) in f.axis_iter(Axis(0)).zip(out.axis_iter_mut(Axis(0))) {
        dst.assign(&sharpen(src, temperature)?);
    }
    Ok(out)
}

/// One-hot encodes class indices.
pub fn one_hot(labels: &[usize], num_classes: usize) -> Result<GroundTruth> {
    let mut onehot = Array2::zeros((labels.len(), num_classes));
    for (i, &class) in labels.iter().enumerate() {
        if class >= num_classes {
            return Err(Error::ClassOutOfRange { class, num_classes });
        }
        onehot[[i, class]] = 1.0;
    }
    Ok(GroundTruth {
        onehot,
        labels: labels.to_vec(),
    })
}

/// Row-wise argmax of any dense matrix, ties to the lowest column.
pub fn argmax_rows(values: ArrayView2<'_, f64>) -> Vec<usize> {
    values
        .axis_iter(Axis(0))
        .map(|row| {
            let mut best = 0;
            for (j, &x) in row.iter().enumerate().skip(1) {
                if x > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Predicted class per node.
pub fn argmax_labels(f: &LabelMatrix) -> Vec<usize> {
    argmax_rows(f.view())
}
