//! Compares LERP against its two ablations (no embedding iteration, no
//! classifier in the rounds) on the planted-partition fixture.
//!
//! cargo run --release --example ablation -- [repeats]

use lerp::experiment::{ExperimentPlan, evaluate, mean_std};
use lerp::{PlantedPartition, SolverConfig, Variant, make_planted_partition};

fn main() -> lerp::Result<()> {
    let repeats = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let ds = make_planted_partition(&PlantedPartition::default())?;
    let plan = ExperimentPlan {
        repeats,
        ..Default::default()
    };

    for k in [1, 2] {
        println!("{k} label(s) per class, {repeats} splits");
        for variant in [Variant::Lerp, Variant::GraphHop, Variant::LerpV] {
            let cfg = SolverConfig {
                variant,
                ..Default::default()
            };
            let runs = evaluate(&ds, &plan, &cfg, k)?;
            let accs: Vec<f64> = runs.iter().map(|r| 100.0 * r.test_acc).collect();
            let (mean, std) = mean_std(&accs);
            println!("  {variant:<9} {mean:6.2} ± {std:5.2}");
        }
    }
    Ok(())
}
