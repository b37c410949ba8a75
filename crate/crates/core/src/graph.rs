//! Sparse undirected graphs in CSR form, random-walk normalization,
//! hop aggregation, multi-source BFS and kNN graph construction.
//!
//! Everything downstream works with [`NormalizedView`], the row-stochastic
//! operator `Ã = D⁻¹A`. Powers of `Ã` are never materialized: `Ã^m · S` is
//! always evaluated as `m` successive sparse-dense products.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2, Axis, Zip, s};

use crate::error::{Error, Result};

/// Below this many output entries the sparse-dense product runs on the
/// calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 15;

/// Undirected weighted graph stored as symmetric CSR.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    weights: Vec<f64>,
    degree: Vec<f64>,
}

impl SparseGraph {
    /// Builds a graph from undirected edges `(u, v, w)`.
    ///
    /// Every edge is stored in both directions. Repeated entries for the
    /// same `(row, col)` are collapsed with their weights summed. A
    /// self-loop `(u, u, w)` is stored once.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            for index in [u, v] {
                if index >= n {
                    return Err(Error::NodeOutOfRange { index, n });
                }
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidWeight { u, v, weight: w });
            }
            *entries.entry((u, v)).or_insert(0.0) += w;
            if u != v {
                *entries.entry((v, u)).or_insert(0.0) += w;
            }
        }

        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut weights = Vec::with_capacity(entries.len());
        for (&(r, c), &w) in &entries {
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            weights.push(w);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let degree = (0..n)
            .map(|i| weights[row_ptr[i]..row_ptr[i + 1]].iter().sum())
            .collect();

        Ok(Self {
            n,
            row_ptr,
            col_idx,
            weights,
            degree,
        })
    }

    /// Builds an unweighted graph (all weights 1.0).
    pub fn from_unweighted_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges(n, edges.iter().map(|&(u, v)| (u, v, 1.0)))
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// Number of stored CSR entries (each undirected edge counts twice,
    /// self-loops once).
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Number of undirected edges, self-loops included.
    pub fn num_edges(&self) -> usize {
        self.edges().count()
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Column indices and weights of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.weights[range])
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        self.row(i).0
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let (cols, ws) = self.row(u);
        cols.binary_search(&v).ok().map(|k| ws[k])
    }

    /// Undirected edges as `(u, v, w)` with `u <= v`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |u| {
            let (cols, ws) = self.row(u);
            cols.iter()
                .zip(ws)
                .filter(move |(v, _)| **v >= u)
                .map(move |(&v, &w)| (u, v, w))
        })
    }

    pub fn has_self_loops(&self) -> bool {
        (0..self.n).any(|i| self.neighbors(i).binary_search(&i).is_ok())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| {
            let (cols, ws) = self.row(u);
            cols.iter()
                .zip(ws)
                .all(|(&v, &w)| self.weight(v, u) == Some(w))
        })
    }

    /// Random-walk normalization `Ã = D⁻¹A`.
    pub fn normalize_random_walk(&self) -> NormalizedView {
        let mut values = Vec::with_capacity(self.weights.len());
        let mut isolated = Vec::new();
        for i in 0..self.n {
            let d = self.degree[i];
            if d > 0.0 {
                let (_, ws) = self.row(i);
                values.extend(ws.iter().map(|w| w / d));
            } else {
                isolated.push(i);
            }
        }
        NormalizedView {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values,
            isolated,
        }
    }

    /// Reads the `u v [w]` edge-list format. Node count defaults to one past
    /// the largest index seen.
    pub fn read_edge_list(path: impl AsRef<Path>, n: Option<usize>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse_edge_list(BufReader::new(file), path, n)
    }

    /// Parses the edge-list format from any reader; `origin` is only used in
    /// error messages.
    pub fn parse_edge_list<R: BufRead>(reader: R, origin: &Path, n: Option<usize>) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut edges = Vec::new();
        let mut max_index = None;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(parse_err(lineno + 1, format!("expected `u v [w]`, got {trimmed:?}")));
            }
            let node = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| parse_err(lineno + 1, format!("bad node index {s:?}: {e}")))
            };
            let u = node(fields[0])?;
            let v = node(fields[1])?;
            let w = match fields.get(2) {
                Some(s) => s
                    .parse::<f64>()
                    .map_err(|e| parse_err(lineno + 1, format!("bad weight {s:?}: {e}")))?,
                None => 1.0,
            };
            max_index = Some(max_index.map_or(u.max(v), |m: usize| m.max(u).max(v)));
            edges.push((u, v, w));
        }
        let n = n.unwrap_or_else(|| max_index.map_or(0, |m| m + 1));
        Self::from_edges(n, edges)
    }

    /// Writes each undirected edge once as `u v` (unit weight) or `u v w`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v, w) in self.edges() {
            if w == 1.0 {
                writeln!(out, "{u} {v}")?;
            } else {
                writeln!(out, "{u} {v} {w}")?;
            }
        }
        Ok(())
    }
}

/// The random-walk normalized adjacency `Ã = D⁻¹A` together with the
/// implied Laplacian `L̃ = D⁺L`.
///
/// `L̃ = I − Ã` on nodes with positive degree; isolated nodes have a zero
/// row of `Ã` and a zero row of `L̃`.
#[derive(Debug, Clone)]
pub struct NormalizedView {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    isolated: Vec<usize>,
}

impl NormalizedView {
    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// Nodes with zero degree; their rows of `Ã` are all zero.
    pub fn isolated(&self) -> &[usize] {
        &self.isolated
    }

    /// Column indices and normalized weights of row `i` of `Ã`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    /// `Ã · x` for a dense `n × k` signal.
    pub fn propagate(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((self.n, x.ncols()));
        self.propagate_into(x, &mut out)?;
        Ok(out)
    }

    /// `out ← Ã · x`. Rows are computed independently with a fixed
    /// summation order, so the result does not depend on the thread count.
    pub fn propagate_into(&self, x: ArrayView2<'_, f64>, out: &mut Array2<f64>) -> Result<()> {
        if x.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.nrows(),
                context: "signal rows vs graph nodes",
            });
        }
        if out.dim() != (self.n, x.ncols()) {
            return Err(Error::DimensionMismatch {
                expected: self.n * x.ncols(),
                got: out.len(),
                context: "output buffer size",
            });
        }
        let kernel = |i: usize, mut row: ndarray::ArrayViewMut1<'_, f64>| {
            row.fill(0.0);
            let (cols, vals) = self.row(i);
            for (&j, &a) in cols.iter().zip(vals) {
                row.scaled_add(a, &x.row(j));
            }
        };
        if self.n * x.ncols() >= PARALLEL_THRESHOLD {
            use rayon::prelude::*;
            out.axis_iter_mut(Axis(0))
                .into_par_iter()
                .enumerate()
                .for_each(|(i, row)| kernel(i, row));
        } else {
            out.axis_iter_mut(Axis(0))
                .enumerate()
                .for_each(|(i, row)| kernel(i, row));
        }
        Ok(())
    }

    /// `out ← (I − L̃) · x`: like [`propagate_into`](Self::propagate_into)
    /// but isolated rows keep their value, so row-stochastic signals stay
    /// row-stochastic.
    pub fn smooth_into(&self, x: ArrayView2<'_, f64>, out: &mut Array2<f64>) -> Result<()> {
        self.propagate_into(x, out)?;
        for &i in &self.isolated {
            out.row_mut(i).assign(&x.row(i));
        }
        Ok(())
    }

    /// `tr(Fᵀ L̃ F) = Σᵢ ‖fᵢ‖² − Σᵢⱼ Ãᵢⱼ ⟨fᵢ, fⱼ⟩` over non-isolated rows,
    /// evaluated over stored entries only.
    pub fn laplacian_quadratic(&self, f: ArrayView2<'_, f64>) -> Result<f64> {
        if f.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: f.nrows(),
                context: "embedding rows vs graph nodes",
            });
        }
        let mut total = 0.0;
        for i in 0..self.n {
            let (cols, _) = self.row(i);
            if cols.is_empty() {
                continue;
            }
            let fi = f.row(i);
            let mut acc = fi.dot(&fi);
            let (cols, vals) = self.row(i);
            for (&j, &a) in cols.iter().zip(vals) {
                acc -= a * fi.dot(&f.row(j));
            }
            total += acc;
        }
        Ok(total)
    }

    /// Dense copy of `Ã`. Intended for small test oracles only.
    pub fn to_dense(&self) -> Array2<f64> {
        let mut dense = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &a) in cols.iter().zip(vals) {
                dense[[i, j]] = a;
            }
        }
        dense
    }

    /// Dense copy of `L̃`. Intended for small test oracles only.
    pub fn laplacian_dense(&self) -> Array2<f64> {
        let mut dense = -self.to_dense();
        for i in 0..self.n {
            if self.row_ptr[i] < self.row_ptr[i + 1] {
                dense[[i, i]] += 1.0;
            }
        }
        dense
    }
}

/// Column-wise concatenation `[S ‖ ÃS ‖ … ‖ Ã^M S]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HopStack {
    data: Array2<f64>,
    block_width: usize,
}

impl HopStack {
    /// Number of hops `M`; the stack holds `M + 1` blocks.
    pub fn hops(&self) -> usize {
        if self.block_width == 0 {
            0
        } else {
            self.data.ncols() / self.block_width - 1
        }
    }

    pub fn block_width(&self) -> usize {
        self.block_width
    }

    pub fn num_rows(&self) -> usize {
        self.data.nrows()
    }

    /// Block `m`, i.e. `Ã^m S`.
    pub fn block(&self, m: usize) -> ArrayView2<'_, f64> {
        let w = self.block_width;
        self.data.slice(s![.., m * w..(m + 1) * w])
    }

    /// Concatenation of the selected blocks in the given order.
    pub fn select_blocks(&self, blocks: &[usize]) -> Array2<f64> {
        let w = self.block_width;
        let mut out = Array2::zeros((self.data.nrows(), w * blocks.len()));
        for (slot, &m) in blocks.iter().enumerate() {
            out.slice_mut(s![.., slot * w..(slot + 1) * w])
                .assign(&self.block(m));
        }
        out
    }

    pub fn as_matrix(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.data
    }
}

/// Builds the hop stack of `signal` up to `hops` steps of `Ã`.
pub fn hop_aggregate(view: &NormalizedView, signal: ArrayView2<'_, f64>, hops: usize) -> Result<HopStack> {
    if signal.nrows() != view.num_nodes() {
        return Err(Error::DimensionMismatch {
            expected: view.num_nodes(),
            got: signal.nrows(),
            context: "signal rows vs graph nodes",
        });
    }
    let k = signal.ncols();
    let mut data = Array2::zeros((signal.nrows(), k * (hops + 1)));
    data.slice_mut(s![.., 0..k]).assign(&signal);
    let mut current = signal.to_owned();
    let mut next = Array2::zeros(current.dim());
    for m in 1..=hops {
        view.propagate_into(current.view(), &mut next)?;
        std::mem::swap(&mut current, &mut next);
        data.slice_mut(s![.., m * k..(m + 1) * k]).assign(&current);
    }
    Ok(HopStack { data, block_width: k })
}

/// Multi-source BFS hop counts; `None` marks nodes unreachable from every
/// source.
pub fn hop_distances(graph: &SparseGraph, sources: &[usize]) -> Result<Vec<Option<usize>>> {
    if sources.is_empty() {
        return Err(Error::EmptyInput("BFS source set"));
    }
    let n = graph.num_nodes();
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if s >= n {
            return Err(Error::NodeOutOfRange { index: s, n });
        }
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = dist[u].map(|d| d + 1);
        for &v in graph.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    Ok(dist)
}

/// Edge weighting used by [`knn_graph`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum KnnWeighting {
    /// Every edge has weight 1.0.
    #[default]
    Unit,
    /// Edge weight is the Euclidean distance between its endpoints.
    Distance,
}

/// Brute-force k-nearest-neighbor graph over the rows of `points`,
/// symmetrized by union. Ties in distance go to the lower node index.
pub fn knn_graph(points: ArrayView2<'_, f64>, k: usize, weighting: KnnWeighting) -> Result<SparseGraph> {
    let n = points.nrows();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k >= n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be smaller than the number of points ({n})"
        )));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("kNN input points"));
    }

    let mut pairs = BTreeSet::new();
    let mut candidates: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        candidates.clear();
        let pi = points.row(i);
        for j in (0..n).filter(|&j| j != i) {
            let mut d2 = 0.0;
            Zip::from(&pi).and(&points.row(j)).for_each(|a, b| {
                let diff = a - b;
                d2 += diff * diff;
            });
            candidates.push((d2, j));
        }
        candidates.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in &candidates[..k] {
            pairs.insert((i.min(j), i.max(j)));
        }
    }

    let mut edges = Vec::with_capacity(pairs.len());
    for (u, v) in pairs {
        let w = match weighting {
            KnnWeighting::Unit => 1.0,
            KnnWeighting::Distance => {
                let d: f64 = points
                    .row(u)
                    .iter()
                    .zip(points.row(v))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if d == 0.0 {
                    return Err(Error::InvalidWeight { u, v, weight: d });
                }
                d
            }
        };
        edges.push((u, v, w));
    }
    SparseGraph::from_edges(n, edges)
}
