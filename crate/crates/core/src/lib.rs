//! Semi-supervised node classification by alternating label-embedding
//! propagation and classifier training.
//!
//! Nodes carry label embeddings: rows of a row-stochastic `n × c` matrix `F`.
//! Each round smooths `F` over the graph with an anchored random-walk
//! iteration, then retrains logistic-regression heads on hop-aggregated
//! embeddings using ground truth and sharpened pseudo-labels from a
//! hop-distance curriculum.
//!
//! ```no_run
//! use lerp::{Problem, SolverConfig, make_blobs, sample_split, solver};
//!
//! let ds = make_blobs(40, 3, 8, 5.0, 7)?;
//! let split = sample_split(&ds, 1, 0)?;
//! let problem = Problem::new(&ds, &split)?;
//! let outcome = solver::run(&problem, &SolverConfig::default())?;
//! println!("test accuracy {:.3}", outcome.test_acc.unwrap());
//! # Ok::<(), lerp::Error>(())
//! ```

pub mod classifier;
pub mod data;
pub mod embeddings;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod propagation;
pub mod solver;

pub use classifier::{Classifier, TrainConfig, TrainingSet};
pub use data::{Dataset, PlantedPartition, SplitSpec, load_dataset, make_blobs, make_planted_partition, sample_split};
pub use embeddings::{GroundTruth, LabelMatrix};
pub use error::{Error, Result};
pub use graph::{HopStack, KnnWeighting, NormalizedView, SparseGraph};
pub use propagation::{PropagationParams, RegularizerWeights};
pub use solver::{Outcome, Problem, RoundTrace, Solver, SolverConfig, Variant};
