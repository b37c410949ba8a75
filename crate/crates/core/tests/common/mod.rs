//! Fixtures and brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use lerp::embeddings::softmax_rows;
use lerp::{LabelMatrix, SparseGraph};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi `G(n, p)` with unit weights.
pub fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> SparseGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    SparseGraph::from_unweighted_edges(n, &edges).unwrap()
}

/// Resamples until the graph is connected.
pub fn connected_erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> SparseGraph {
    loop {
        let g = erdos_renyi(n, p, rng);
        if floyd_warshall(&g).iter().all(|row| row.iter().all(Option::is_some)) {
            return g;
        }
    }
}

/// Random positive weights on a `G(n, p)` edge set.
pub fn weighted_erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> SparseGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v, rng.random_range(0.1..3.0)));
            }
        }
    }
    SparseGraph::from_edges(n, edges).unwrap()
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| StandardNormal.sample(rng))
}

/// Softmax of Gaussian logits scaled by `spread`.
pub fn random_stochastic(rows: usize, cols: usize, spread: f64, rng: &mut ChaCha8Rng) -> LabelMatrix {
    softmax_rows((gaussian(rows, cols, rng) * spread).view())
}

/// All-pairs hop counts; `None` for unreachable pairs.
pub fn floyd_warshall(g: &SparseGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.num_nodes();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
        for &j in g.neighbors(i) {
            if j != i {
                row[j] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Dense `Ã` built straight from the edge list.
pub fn dense_random_walk(g: &SparseGraph) -> Array2<f64> {
    let n = g.num_nodes();
    let mut a = Array2::zeros((n, n));
    for (u, v, w) in g.edges() {
        a[[u, v]] += w;
        if u != v {
            a[[v, u]] += w;
        }
    }
    for mut row in a.rows_mut() {
        let s: f64 = row.sum();
        if s > 0.0 {
            row /= s;
        }
    }
    a
}

/// Dense inverse by Gauss–Jordan elimination with partial pivoting.
pub fn dense_inverse(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut inv = Array2::<f64>::eye(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[[i, col]].abs().total_cmp(&m[[j, col]].abs()))
            .unwrap();
        assert!(m[[pivot, col]].abs() > 1e-14, "singular matrix");
        for k in 0..n {
            m.swap([col, k], [pivot, k]);
            inv.swap([col, k], [pivot, k]);
        }
        let p = m[[col, col]];
        for k in 0..n {
            m[[col, k]] /= p;
            inv[[col, k]] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[[r, col]];
                if f != 0.0 {
                    for k in 0..n {
                        m[[r, k]] -= f * m[[col, k]];
                        inv[[r, k]] -= f * inv[[col, k]];
                    }
                }
            }
        }
    }
    inv
}

pub fn max_abs(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Worst row-sum error or negative entry.
pub fn simplex_error(f: &Array2<f64>) -> f64 {
    f.rows()
        .into_iter()
        .map(|r| (r.sum() - 1.0).abs().max(r.iter().fold(0.0f64, |m, &x| m.max(-x))))
        .fold(0.0, f64::max)
}
