//! Writes the synthetic planted-partition dataset in the on-disk format the
//! `lerp` binary reads, loads it back and samples a split.
//!
//! cargo run --example dataset_io -- /tmp/planted
//! cargo run --release --bin lerp -- run --dataset /tmp/planted --labels-per-class 1,2 --repeats 3

use lerp::{PlantedPartition, load_dataset, make_planted_partition, sample_split};

fn main() -> lerp::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "planted".into());
    let ds = make_planted_partition(&PlantedPartition::default())?;
    ds.save(&dir)?;

    let loaded = load_dataset(&dir)?;
    assert_eq!(loaded.labels, ds.labels);
    assert_eq!(loaded.graph.num_edges(), ds.graph.num_edges());
    println!(
        "{dir}: {} nodes, {} edges, {} features, {} classes",
        loaded.num_nodes(),
        loaded.graph.num_edges(),
        loaded.feature_dim(),
        loaded.num_classes
    );

    let split = sample_split(&loaded, 4, 0)?;
    println!(
        "4 labels/class: {} labeled, {} validation, {} test",
        split.labeled.len(),
        split.validation.len(),
        split.test.len()
    );
    Ok(())
}
