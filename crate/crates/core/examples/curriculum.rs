//! Shows how the pseudo-label curriculum grows with the round counter.
//!
//! cargo run --release --example curriculum

use lerp::solver::grow_curriculum;
use lerp::{PlantedPartition, make_planted_partition, sample_split};

fn main() -> lerp::Result<()> {
    let ds = make_planted_partition(&PlantedPartition::default())?;
    let split = sample_split(&ds, 1, 3)?;
    let unlabeled = ds.num_nodes() - split.labeled.len();
    println!("{} labeled, {unlabeled} unlabeled", split.labeled.len());
    for r in 1..=8 {
        let set = grow_curriculum(&ds.graph, &split.labeled, r)?;
        println!(
            "round {r}: |S| = {:4}  ({:5.1}% of unlabeled nodes)",
            set.len(),
            100.0 * set.len() as f64 / unlabeled as f64
        );
    }
    Ok(())
}
