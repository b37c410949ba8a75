//! Trains a softmax-regression head with Adam and early stopping on raw
//! attributes and reports the epoch history.
//!
//! cargo run --release --example classifier

use lerp::classifier::{Classifier, TrainConfig, TrainingSet, train};
use lerp::embeddings::{argmax_rows, one_hot};
use lerp::{make_blobs, sample_split};
use ndarray::Axis;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lerp::Result<()> {
    let ds = make_blobs(100, 4, 6, 3.0, 1)?;
    let split = sample_split(&ds, 5, 0)?;
    let pick = |nodes: &[usize]| -> lerp::Result<TrainingSet> {
        let labels: Vec<usize> = nodes.iter().map(|&i| ds.labels[i]).collect();
        TrainingSet::supervised(ds.features.select(Axis(0), nodes).view(), &one_hot(&labels, ds.num_classes)?)
    };
    let train_set = pick(&split.labeled)?;
    let validation = pick(&split.validation)?;

    let mut cls = Classifier::zeros(ds.num_classes, ds.feature_dim());
    let report = train(
        &mut cls,
        &train_set,
        Some(&validation),
        &TrainConfig::default(),
        &mut ChaCha8Rng::seed_from_u64(0),
    )?;
    println!("{} epochs, best at {}", report.epochs_run(), report.best_epoch);
    for e in report.history.iter().step_by(25) {
        println!("  epoch {:4}  train {:.4}  val {:.4}", e.epoch, e.train_loss, e.validation_loss.unwrap_or(f64::NAN));
    }

    let pred = argmax_rows(cls.predict(ds.features.select(Axis(0), &split.test).view())?.view());
    let hits = pred.iter().zip(&split.test).filter(|&(&p, &i)| p == ds.labels[i]).count();
    println!("test accuracy {:.3}", hits as f64 / split.test.len() as f64);
    Ok(())
}
