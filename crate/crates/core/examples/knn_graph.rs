//! Builds kNN graphs from point clouds under both edge-weight readings and
//! checks how well connected components line up with classes.
//!
//! cargo run --release --example knn_graph

use lerp::graph::{KnnWeighting, hop_distances, knn_graph};
use lerp::make_blobs;

fn main() -> lerp::Result<()> {
    let ds = make_blobs(30, 4, 3, 20.0, 5)?;
    for weighting in [KnnWeighting::Unit, KnnWeighting::Distance] {
        let g = knn_graph(ds.features.view(), 7, weighting)?;
        let mut component = vec![usize::MAX; g.num_nodes()];
        let mut count = 0;
        for v in 0..g.num_nodes() {
            if component[v] != usize::MAX {
                continue;
            }
            for (u, d) in hop_distances(&g, &[v])?.iter().enumerate() {
                if d.is_some() {
                    component[u] = count;
                }
            }
            count += 1;
        }
        let mixed = (0..count)
            .filter(|&c| {
                let mut classes: Vec<usize> = (0..g.num_nodes())
                    .filter(|&u| component[u] == c)
                    .map(|u| ds.labels[u])
                    .collect();
                classes.dedup();
                classes.len() > 1
            })
            .count();
        let total: f64 = g.edges().map(|(_, _, w)| w).sum();
        println!(
            "{weighting:?}: {} edges, total weight {total:.1}, {count} components, {mixed} mixing classes",
            g.num_edges()
        );
    }
    Ok(())
}
