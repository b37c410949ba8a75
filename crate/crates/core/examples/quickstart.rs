//! Runs LERP once on a synthetic citation-like graph and prints the
//! per-round trace.
//!
//! cargo run --release --example quickstart

use lerp::{PlantedPartition, Problem, SolverConfig, make_planted_partition, sample_split, solver};

fn main() -> lerp::Result<()> {
    let ds = make_planted_partition(&PlantedPartition::default())?;
    println!(
        "{}: {} nodes, {} edges, {} features, {} classes",
        ds.name,
        ds.num_nodes(),
        ds.graph.num_edges(),
        ds.feature_dim(),
        ds.num_classes
    );

    let split = sample_split(&ds, 2, 0)?;
    let problem = Problem::new(&ds, &split)?;
    let outcome = solver::run(&problem, &SolverConfig::default())?;

    println!(
        "init: val {:.3} test {:.3}",
        outcome.trace.init_val_acc,
        outcome.trace.init_test_acc.unwrap_or(f64::NAN)
    );
    outcome.trace.write_csv(std::io::stdout()).expect("stdout");
    println!("final test accuracy {:.3}", outcome.test_acc.unwrap_or(f64::NAN));
    Ok(())
}
