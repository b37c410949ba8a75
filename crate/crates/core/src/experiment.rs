//! Multi-seed evaluation, validation-based grid search and result tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, sample_split};
use crate::error::{Error, Result};
use crate::solver::{self, Problem, RoundTrace, SolverConfig, Variant};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "LERP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub temperature: f64,
    pub alpha: f64,
    pub beta: f64,
    pub max_iter: usize,
}

impl HyperParams {
    pub fn from_config(cfg: &SolverConfig) -> Self {
        Self {
            temperature: cfg.temperature,
            alpha: cfg.alpha,
            beta: cfg.beta,
            max_iter: cfg.max_iter,
        }
    }

    pub fn apply(&self, base: &SolverConfig) -> SolverConfig {
        SolverConfig {
            temperature: self.temperature,
            alpha: self.alpha,
            beta: self.beta,
            max_iter: self.max_iter,
            ..base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub temperature: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub max_iter: Vec<usize>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            temperature: vec![0.1, 0.5, 1.0, 10.0, 100.0],
            alpha: vec![0.1, 1.0, 10.0, 100.0],
            beta: vec![0.1, 0.5, 0.9],
            max_iter: vec![1, 5, 10],
        }
    }
}

impl Grid {
    pub fn singleton(hp: HyperParams) -> Self {
        Self {
            temperature: vec![hp.temperature],
            alpha: vec![hp.alpha],
            beta: vec![hp.beta],
            max_iter: vec![hp.max_iter],
        }
    }

    /// Grid points with `max_iter` varying fastest.
    pub fn points(&self) -> Vec<HyperParams> {
        let mut out = Vec::with_capacity(self.len());
        for &temperature in &self.temperature {
            for &alpha in &self.alpha {
                for &beta in &self.beta {
                    for &max_iter in &self.max_iter {
                        out.push(HyperParams {
                            temperature,
                            alpha,
                            beta,
                            max_iter,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.temperature.len() * self.alpha.len() * self.beta.len() * self.max_iter.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub label_rates: Vec<usize>,
    pub repeats: usize,
    /// Split seeds are `seed, seed + 1, …`.
    pub seed: u64,
    pub grid: Grid,
    /// Settings not covered by the grid.
    pub base: SolverConfig,
    pub keep_traces: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            label_rates: vec![1, 2, 4, 8, 16, 20],
            repeats: 10,
            seed: 0,
            grid: Grid::default(),
            base: SolverConfig::default(),
            keep_traces: false,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("hyperparameter grid is empty".into()));
        }
        if self.label_rates.is_empty() {
            return Err(Error::InvalidParameter("no label rates given".into()));
        }
        self.base.validate()
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.repeats as u64).map(move |i| self.seed + i)
    }
}

/// One solver run on one split.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub dataset: String,
    pub variant: Variant,
    pub labels_per_class: usize,
    pub seed: u64,
    pub params: HyperParams,
    pub val_acc: f64,
    pub test_acc: f64,
    pub rounds: usize,
    pub seconds: f64,
    pub trace: Option<RoundTrace>,
}

/// Samples the split for `seed` and runs the solver with test labels
/// attached.
pub fn run_single(
    ds: &Dataset,
    cfg: &SolverConfig,
    labels_per_class: usize,
    seed: u64,
    keep_trace: bool,
) -> Result<RunResult> {
    let start = Instant::now();
    let split = sample_split(ds, labels_per_class, seed)?;
    let problem = Problem::new(ds, &split)?;
    let cfg = SolverConfig { seed, ..cfg.clone() };
    let outcome = solver::run(&problem, &cfg)?;
    Ok(RunResult {
        dataset: ds.name.clone(),
        variant: cfg.variant,
        labels_per_class,
        seed,
        params: HyperParams::from_config(&cfg),
        val_acc: outcome.val_acc,
        test_acc: outcome.test_acc.unwrap_or(0.0),
        rounds: outcome.trace.rounds.len(),
        seconds: start.elapsed().as_secs_f64(),
        trace: keep_trace.then_some(outcome.trace),
    })
}

/// Runs every repeat of `plan` at one label rate.
pub fn evaluate(ds: &Dataset, plan: &ExperimentPlan, cfg: &SolverConfig, labels_per_class: usize) -> Result<Vec<RunResult>> {
    let seeds: Vec<u64> = plan.seeds().collect();
    seeds
        .par_iter()
        .map(|&seed| run_single(ds, cfg, labels_per_class, seed, plan.keep_traces))
        .collect()
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub best: HyperParams,
    /// Mean validation accuracy of every grid point, in grid order.
    pub scores: Vec<(HyperParams, f64)>,
}

/// Mean validation accuracy of one configuration; test labels are withheld.
fn validation_score(ds: &Dataset, cfg: &SolverConfig, labels_per_class: usize, seed: u64) -> Result<f64> {
    let split = sample_split(ds, labels_per_class, seed)?;
    if split.validation.is_empty() {
        return Err(Error::EmptyInput("validation set"));
    }
    let problem = Problem::without_test(ds, &split)?;
    let cfg = SolverConfig { seed, ..cfg.clone() };
    Ok(solver::run(&problem, &cfg)?.val_acc)
}

/// Picks the grid point with the highest mean validation accuracy over the
/// plan's seeds; ties go to the earliest point.
pub fn grid_search(ds: &Dataset, plan: &ExperimentPlan, labels_per_class: usize) -> Result<GridOutcome> {
    plan.validate()?;
    let points = plan.grid.points();
    let seeds: Vec<u64> = plan.seeds().collect();
    let jobs: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    let accs: Vec<f64> = jobs
        .par_iter()
        .map(|&(p, seed)| validation_score(ds, &points[p].apply(&plan.base), labels_per_class, seed))
        .collect::<Result<_>>()?;

    let scores: Vec<(HyperParams, f64)> = points
        .iter()
        .zip(accs.chunks(seeds.len()))
        .map(|(&hp, chunk)| (hp, chunk.iter().sum::<f64>() / chunk.len() as f64))
        .collect();
    let mut best = 0;
    for (i, (_, score)) in scores.iter().enumerate() {
        if *score > scores[best].1 {
            best = i;
        }
    }
    Ok(GridOutcome {
        best: scores[best].0,
        scores,
    })
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// One cell of a result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub variant: String,
    pub labels_per_class: usize,
    pub repeats: usize,
    /// Mean test accuracy in percent.
    pub mean: f64,
    /// Population standard deviation in percent.
    pub std: f64,
    pub temperature: f64,
    pub alpha: f64,
    pub beta: f64,
    pub max_iter: usize,
    pub seconds: f64,
}

/// Per-run record written to `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub dataset: String,
    pub variant: String,
    pub labels_per_class: usize,
    pub seed: u64,
    pub temperature: f64,
    pub alpha: f64,
    pub beta: f64,
    pub max_iter: usize,
    pub val_acc: f64,
    pub test_acc: f64,
    pub rounds: usize,
    pub seconds: f64,
}

impl From<&RunResult> for RunRow {
    fn from(r: &RunResult) -> Self {
        Self {
            dataset: r.dataset.clone(),
            variant: r.variant.to_string(),
            labels_per_class: r.labels_per_class,
            seed: r.seed,
            temperature: r.params.temperature,
            alpha: r.params.alpha,
            beta: r.params.beta,
            max_iter: r.params.max_iter,
            val_acc: r.val_acc,
            test_acc: r.test_acc,
            rounds: r.rounds,
            seconds: r.seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Aggregates runs grouped by (dataset, variant, label rate, params), in
    /// first-seen order.
    pub fn from_runs(runs: &[RunRow]) -> Self {
        let mut groups: Vec<(ResultRow, Vec<f64>)> = Vec::new();
        for run in runs {
            let key = |row: &ResultRow| {
                row.dataset == run.dataset
                    && row.variant == run.variant
                    && row.labels_per_class == run.labels_per_class
                    && row.temperature == run.temperature
                    && row.alpha == run.alpha
                    && row.beta == run.beta
                    && row.max_iter == run.max_iter
            };
            match groups.iter_mut().find(|(row, _)| key(row)) {
                Some((row, accs)) => {
                    accs.push(run.test_acc);
                    row.seconds += run.seconds;
                }
                None => groups.push((
                    ResultRow {
                        dataset: run.dataset.clone(),
                        variant: run.variant.clone(),
                        labels_per_class: run.labels_per_class,
                        repeats: 0,
                        mean: 0.0,
                        std: 0.0,
                        temperature: run.temperature,
                        alpha: run.alpha,
                        beta: run.beta,
                        max_iter: run.max_iter,
                        seconds: run.seconds,
                    },
                    vec![run.test_acc],
                )),
            }
        }
        let rows = groups
            .into_iter()
            .map(|(mut row, accs)| {
                let pct: Vec<f64> = accs.iter().map(|a| 100.0 * a).collect();
                (row.mean, row.std) = mean_std(&pct);
                row.repeats = accs.len();
                row
            })
            .collect();
        Self { rows }
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for row in &self.rows {
            writer.serialize(row)?;
        }
        writer.flush().map_err(|e| Error::io("results.csv", e))?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let rows = csv::Reader::from_reader(input)
            .deserialize()
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { rows })
    }

    /// Markdown table: one line per (dataset, variant), one column per label
    /// rate, `mean ± std` cells, column maxima in bold.
    pub fn to_markdown(&self) -> String {
        let mut rates: Vec<usize> = self.rows.iter().map(|r| r.labels_per_class).collect();
        rates.sort_unstable();
        rates.dedup();
        let mut lines: Vec<(String, String)> = Vec::new();
        for r in &self.rows {
            let key = (r.dataset.clone(), r.variant.clone());
            if !lines.contains(&key) {
                lines.push(key);
            }
        }
        let cell = |line: &(String, String), rate: usize| {
            self.rows
                .iter()
                .find(|r| r.dataset == line.0 && r.variant == line.1 && r.labels_per_class == rate)
        };
        let best: Vec<f64> = rates
            .iter()
            .map(|&rate| {
                self.rows
                    .iter()
                    .filter(|r| r.labels_per_class == rate)
                    .map(|r| r.mean)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();

        let mut md = String::from("| Method |");
        for rate in &rates {
            let _ = write!(md, " {rate} |");
        }
        md.push_str("\n|---|");
        md.push_str(&"---|".repeat(rates.len()));
        md.push('\n');
        for line in &lines {
            let _ = write!(md, "| {} ({}) |", line.1, line.0);
            for (j, &rate) in rates.iter().enumerate() {
                match cell(line, rate) {
                    Some(r) => {
                        let text = format!("{:.2} ± {:.2}", r.mean, r.std);
                        if r.mean == best[j] {
                            let _ = write!(md, " **{text}** |");
                        } else {
                            let _ = write!(md, " {text} |");
                        }
                    }
                    None => md.push_str(" - |"),
                }
            }
            md.push('\n');
        }
        md
    }
}

pub fn write_runs<W: std::io::Write>(runs: &[RunRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for run in runs {
        writer.serialize(run)?;
    }
    writer.flush().map_err(|e| Error::io("runs.csv", e))?;
    Ok(())
}

pub fn read_runs<R: std::io::Read>(input: R) -> Result<Vec<RunRow>> {
    Ok(csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()?)
}

/// Writes `runs.csv`, `results.csv`, `results.md` and, for runs that kept
/// one, `traces/<dataset>_<variant>_k<rate>_s<seed>.csv` under `dir`.
pub fn report(runs: &[RunResult], dir: &Path) -> Result<ResultTable> {
    if runs.is_empty() {
        return Err(Error::EmptyInput("run results"));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let rows: Vec<RunRow> = runs.iter().map(RunRow::from).collect();
    let table = ResultTable::from_runs(&rows);

    let create = |name: &str| {
        let path = dir.join(name);
        fs::File::create(&path).map_err(|e| Error::io(path, e))
    };
    write_runs(&rows, create("runs.csv")?)?;
    table.write_csv(create("results.csv")?)?;
    let md_path = dir.join("results.md");
    fs::write(&md_path, table.to_markdown()).map_err(|e| Error::io(md_path, e))?;

    let traced: Vec<&RunResult> = runs.iter().filter(|r| r.trace.is_some()).collect();
    if !traced.is_empty() {
        let trace_dir = dir.join("traces");
        fs::create_dir_all(&trace_dir).map_err(|e| Error::io(&trace_dir, e))?;
        for run in traced {
            let path = trace_dir.join(format!(
                "{}_{}_k{}_s{}.csv",
                run.dataset, run.variant, run.labels_per_class, run.seed
            ));
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            if let Some(trace) = &run.trace {
                trace
                    .write_csv(std::io::BufWriter::new(file))
                    .map_err(|e| Error::io(&path, e))?;
            }
        }
    }
    Ok(table)
}

/// Re-aggregates an existing `runs.csv` in `dir` into `results.csv` and
/// `results.md`.
pub fn report_from_dir(dir: &Path) -> Result<ResultTable> {
    let runs_path = dir.join("runs.csv");
    let file = fs::File::open(&runs_path).map_err(|e| Error::io(&runs_path, e))?;
    let rows = read_runs(file)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput("runs.csv"));
    }
    let table = ResultTable::from_runs(&rows);
    let csv_path = dir.join("results.csv");
    table.write_csv(fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?)?;
    let md_path = dir.join("results.md");
    fs::write(&md_path, table.to_markdown()).map_err(|e| Error::io(md_path, e))?;
    Ok(table)
}

/// Worker pool sized by `jobs`, else [`THREADS_ENV`], else all cores.
pub fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let from_env = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    let threads = match (jobs, from_env) {
        (Some(j), Some(cap)) => j.min(cap),
        (Some(j), None) => j,
        (None, Some(cap)) => cap,
        (None, None) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}
