use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lerp::experiment::{self, ExperimentPlan, Grid, HyperParams, RunResult};
use lerp::{Dataset, Error, SolverConfig, Variant, load_dataset};

#[derive(Parser)]
#[command(name = "lerp", version, about = "Semi-supervised node classification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate fixed hyperparameters over repeated splits.
    Run(RunArgs),
    /// Select hyperparameters on validation accuracy, then evaluate.
    Grid(RunArgs),
    /// Rebuild results.csv and results.md from runs.csv in --out.
    Report {
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value = "lerp")]
    variant: Variant,
    /// Comma-separated label rates.
    #[arg(long, value_delimiter = ',', default_value = "20")]
    labels_per_class: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    max_round: usize,
    /// Fix max_iter (and drop it from the grid).
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long, default_value_t = 2)]
    hops: usize,
    #[arg(long)]
    faithful: bool,
    #[arg(long)]
    clamp_labeled: bool,
    #[arg(long)]
    row_normalize_features: bool,
    /// Write per-run round traces under <out>/traces.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

impl RunArgs {
    fn base_config(&self) -> SolverConfig {
        let defaults = SolverConfig::default();
        SolverConfig {
            hops: self.hops,
            max_round: self.max_round,
            max_iter: self.max_iter.unwrap_or(defaults.max_iter),
            alpha: self.alpha.unwrap_or(defaults.alpha),
            beta: self.beta.unwrap_or(defaults.beta),
            temperature: self.temperature.unwrap_or(defaults.temperature),
            variant: self.variant,
            seed: self.seed,
            faithful: self.faithful,
            clamp_labeled: self.clamp_labeled,
            ..defaults
        }
    }

    /// Default grid with any explicitly given value pinned.
    fn grid(&self) -> Grid {
        let mut grid = Grid::default();
        if let Some(t) = self.temperature {
            grid.temperature = vec![t];
        }
        if let Some(a) = self.alpha {
            grid.alpha = vec![a];
        }
        if let Some(b) = self.beta {
            grid.beta = vec![b];
        }
        if let Some(i) = self.max_iter {
            grid.max_iter = vec![i];
        }
        match self.variant {
            Variant::GraphHop => grid.max_iter = vec![0],
            Variant::LerpV => grid.alpha = vec![grid.alpha[0]],
            Variant::Lerp => {}
        }
        grid
    }

    fn plan(&self) -> ExperimentPlan {
        ExperimentPlan {
            label_rates: self.labels_per_class.clone(),
            repeats: self.repeats,
            seed: self.seed,
            grid: self.grid(),
            base: self.base_config(),
            keep_traces: self.trace,
        }
    }

    fn dataset(&self) -> lerp::Result<Dataset> {
        let mut ds = load_dataset(&self.dataset)?;
        if self.row_normalize_features {
            ds.row_normalize_features();
        }
        Ok(ds)
    }
}

fn run(args: &RunArgs, search: bool) -> lerp::Result<()> {
    let ds = args.dataset()?;
    let plan = args.plan();
    plan.validate()?;
    let pool = experiment::thread_pool(args.jobs)?;
    let mut results: Vec<RunResult> = Vec::new();
    let mut grid_lines = vec!["labels_per_class,temperature,alpha,beta,max_iter,mean_val_acc".to_string()];
    for &k in &plan.label_rates {
        let cfg = if search {
            let outcome = pool.install(|| experiment::grid_search(&ds, &plan, k))?;
            for (hp, score) in &outcome.scores {
                grid_lines.push(format!(
                    "{k},{},{},{},{},{score}",
                    hp.temperature, hp.alpha, hp.beta, hp.max_iter
                ));
            }
            eprintln!("k={k}: selected {:?}", outcome.best);
            outcome.best.apply(&plan.base)
        } else {
            plan.base.clone()
        };
        let runs = pool.install(|| experiment::evaluate(&ds, &plan, &cfg, k))?;
        let accs: Vec<f64> = runs.iter().map(|r| 100.0 * r.test_acc).collect();
        let (mean, std) = experiment::mean_std(&accs);
        let hp = HyperParams::from_config(&cfg);
        println!(
            "{} {} k={k}: {mean:.2} ± {std:.2}  (T={} alpha={} beta={} max_iter={})",
            ds.name, args.variant, hp.temperature, hp.alpha, hp.beta, hp.max_iter
        );
        results.extend(runs);
    }
    experiment::report(&results, &args.out)?;
    if search {
        let path = args.out.join("grid.csv");
        std::fs::write(&path, grid_lines.join("\n") + "\n").map_err(|e| io_error(&path, e))?;
    }
    Ok(())
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_numeric() => 3,
        Error::InvalidParameter(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => run(args, false),
        Command::Grid(args) => run(args, true),
        Command::Report { out } => experiment::report_from_dir(out).map(|table| print!("{}", table.to_markdown())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
