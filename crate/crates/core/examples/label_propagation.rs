//! Classical label propagation on a kNN graph: the iterative recursion
//! against the closed-form limit.
//!
//! cargo run --release --example label_propagation

use lerp::embeddings::{argmax_rows, one_hot};
use lerp::propagation::{PropagationParams, lp_closed_form, lp_iterate};
use lerp::{make_blobs, sample_split};
use ndarray::Array2;

fn main() -> lerp::Result<()> {
    let ds = make_blobs(60, 3, 5, 4.0, 11)?;
    let split = sample_split(&ds, 2, 0)?;
    let view = ds.graph.normalize_random_walk();

    let labels: Vec<usize> = split.labeled.iter().map(|&i| ds.labels[i]).collect();
    let truth = one_hot(&labels, ds.num_classes)?;
    let mut y = Array2::zeros((ds.num_nodes(), ds.num_classes));
    for (k, &node) in split.labeled.iter().enumerate() {
        y.row_mut(node).assign(&truth.onehot().row(k));
    }

    let params = PropagationParams {
        alpha_lp: 0.99,
        max_iter: 5000,
        tol: 1e-12,
        ..Default::default()
    };
    let iterated = lp_iterate(&view, y.view(), &params)?;
    let closed = lp_closed_form(&view, y.view(), params.alpha_lp)?;
    let gap = (&iterated - &closed).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    println!("max |iterate − closed form| = {gap:.2e}");

    let pred = argmax_rows(closed.view());
    let hits = split.test.iter().filter(|&&i| pred[i] == ds.labels[i]).count();
    println!("test accuracy {:.3}", hits as f64 / split.test.len() as f64);
    Ok(())
}
