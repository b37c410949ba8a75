//! Tracks the regularized objective across alternating rounds and checks
//! the bounded-descent property `cost_{r+1} ≤ cost_r + 2 tr(U_α)`.
//! Also compares the full variational iteration with its closed form.
//!
//! cargo run --release --example convergence_monitor

use lerp::embeddings::softmax_rows;
use lerp::propagation::{RegularizerWeights, full_variational_iterate, general_closed_form};
use lerp::{Problem, Solver, SolverConfig, make_blobs, sample_split};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> lerp::Result<()> {
    let ds = make_blobs(40, 3, 4, 5.0, 3)?;
    let split = sample_split(&ds, 1, 1)?;
    let problem = Problem::new(&ds, &split)?;
    let cfg = SolverConfig {
        max_round: 25,
        faithful: true,
        ..Default::default()
    };
    let mut solver = Solver::new(&problem, cfg)?;
    let slack = 2.0 * solver.regularizer_weights().trace_u_alpha() + 1e-6;
    while solver.trace().rounds.len() < solver.config().max_round {
        let r = solver.step()?;
        println!(
            "round {:2}  cost {:10.4}  val {:.3}  |S| {:3}  simplex residual {:.1e}",
            r.round, r.cost, r.val_acc, r.curriculum_size, r.simplex_residual
        );
    }
    let violations = solver.trace().descent_violations(slack);
    println!("slack 2 tr(U_α) = {slack:.3}; violations: {violations:?}");

    let view = ds.graph.normalize_random_walk();
    let n = ds.num_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut noise = |_: (usize, usize)| -> f64 { StandardNormal.sample(&mut rng) };
    let f_init = softmax_rows(Array2::from_shape_fn((n, 3), &mut noise).view());
    let pred = softmax_rows(Array2::from_shape_fn((n, 3), &mut noise).view());
    let weights = RegularizerWeights::from_scalars(n, 0.5, 1.0)?;
    let closed = general_closed_form(&view, &weights, &f_init, &pred)?;
    let iterated = full_variational_iterate(&view, &weights, &f_init, &pred, 1000)?;
    println!("closed form vs 1000 iterations: {:.2e}", closed.max_abs_diff(&iterated));
    Ok(())
}
