//! Validation-based hyperparameter selection on a reduced grid, followed by
//! test evaluation of the chosen point and a written report.
//!
//! cargo run --release --example grid_search -- [out_dir]

use lerp::experiment::{ExperimentPlan, Grid, evaluate, grid_search, report};
use lerp::{PlantedPartition, SolverConfig, make_planted_partition};

fn main() -> lerp::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "grid_search_out".into());
    let ds = make_planted_partition(&PlantedPartition::default())?;
    let plan = ExperimentPlan {
        label_rates: vec![2],
        repeats: 3,
        grid: Grid {
            temperature: vec![0.1, 1.0, 10.0],
            alpha: vec![1.0],
            beta: vec![0.5, 0.9],
            max_iter: vec![10],
        },
        base: SolverConfig {
            max_round: 30,
            ..Default::default()
        },
        ..Default::default()
    };

    let outcome = grid_search(&ds, &plan, 2)?;
    for (hp, score) in &outcome.scores {
        println!("T={:<5} beta={:<4} val {:.3}", hp.temperature, hp.beta, score);
    }
    println!("selected {:?}", outcome.best);

    let runs = evaluate(&ds, &plan, &outcome.best.apply(&plan.base), 2)?;
    let table = report(&runs, std::path::Path::new(&out))?;
    print!("{}", table.to_markdown());
    Ok(())
}
