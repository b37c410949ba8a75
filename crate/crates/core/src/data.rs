//! Datasets on disk, per-class split sampling and synthetic fixtures.
//!
//! A dataset directory holds three UTF-8 text files:
//!
//! - `edges.txt`: one undirected edge per line, `u v [w]`
//! - `features.csv`: one node per line, comma-separated floats
//! - `labels.txt`: one class index per line
//!
//! Lines starting with `#` are ignored in all three.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array2, Axis};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::{KnnWeighting, SparseGraph, knn_graph};

pub const EDGES_FILE: &str = "edges.txt";
pub const FEATURES_FILE: &str = "features.csv";
pub const LABELS_FILE: &str = "labels.txt";

/// Validation nodes drawn per split when the remainder allows it.
pub const VALIDATION_SIZE: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub graph: SparseGraph,
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        graph: SparseGraph,
        features: Array2<f64>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        let n = graph.num_nodes();
        for (got, context) in [
            (features.nrows(), "feature rows vs graph nodes"),
            (labels.len(), "labels vs graph nodes"),
        ] {
            if got != n {
                return Err(Error::DimensionMismatch { expected: n, got, context });
            }
        }
        if let Some(&class) = labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::ClassOutOfRange { class, num_classes });
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        Ok(Self {
            name: name.into(),
            graph,
            features,
            labels,
            num_classes,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn feature_dim(&self) -> usize {
        self.features.ncols()
    }

    /// Node indices of each class, ascending.
    pub fn class_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.num_classes];
        for (node, &y) in self.labels.iter().enumerate() {
            members[y].push(node);
        }
        members
    }

    /// Scales every non-zero feature row to unit L1 norm.
    pub fn row_normalize_features(&mut self) {
        for mut row in self.features.axis_iter_mut(Axis(0)) {
            let total: f64 = row.iter().map(|x| x.abs()).sum();
            if total > 0.0 {
                row /= total;
            }
        }
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, body: &dyn Fn(&mut BufWriter<std::fs::File>) -> std::io::Result<()>| {
            let path = dir.join(name);
            let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut out = BufWriter::new(file);
            body(&mut out)
                .and_then(|_| out.flush())
                .map_err(|e| Error::io(&path, e))
        };
        write(EDGES_FILE, &|out| self.graph.write_edge_list(out))?;
        write(FEATURES_FILE, &|out| {
            for row in self.features.axis_iter(Axis(0)) {
                let fields: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                writeln!(out, "{}", fields.join(","))?;
            }
            Ok(())
        })?;
        write(LABELS_FILE, &|out| {
            for y in &self.labels {
                writeln!(out, "{y}")?;
            }
            Ok(())
        })
    }
}

/// Loads a dataset directory. The class count is one past the largest label.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());

    let features = read_features(&dir.join(FEATURES_FILE))?;
    let labels = read_labels(&dir.join(LABELS_FILE))?;
    let n = features.nrows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
            context: "labels.txt rows vs features.csv rows",
        });
    }
    let graph = SparseGraph::read_edge_list(dir.join(EDGES_FILE), Some(n))?;
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    Dataset::new(name, graph, features, labels, num_classes)
}

fn read_features(path: &Path) -> Result<Array2<f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if width.is_some_and(|w| w != record.len()) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected {} columns, got {}", width.unwrap_or(0), record.len()),
            });
        }
        width = Some(record.len());
        for field in &record {
            values.push(field.parse::<f64>().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("bad feature value {field:?}: {e}"),
            })?);
        }
        rows += 1;
    }
    Array2::from_shape_vec((rows, width.unwrap_or(0)), values).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })
}

fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        labels.push(trimmed.parse::<usize>().map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message: format!("bad label {trimmed:?}: {e}"),
        })?);
    }
    Ok(labels)
}

/// Disjoint labeled / validation / test node sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    pub labeled: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    pub labels_per_class: usize,
    pub seed: u64,
}

/// Samples `k` labeled nodes per class, then [`VALIDATION_SIZE`] validation
/// nodes uniformly from the remainder; everything else is test.
///
/// When at most [`VALIDATION_SIZE`] nodes remain, a fifth of the remainder
/// becomes the validation set instead.
pub fn sample_split(ds: &Dataset, k: usize, seed: u64) -> Result<SplitSpec> {
    if k == 0 {
        return Err(Error::InvalidParameter("labels per class must be at least 1".into()));
    }
    let members = ds.class_members();
    let deficient: Vec<usize> = (0..ds.num_classes).filter(|&c| members[c].len() < k).collect();
    if !deficient.is_empty() {
        return Err(Error::DeficientClasses {
            needed: k,
            classes: deficient,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_labeled = vec![false; ds.num_nodes()];
    let mut labeled = Vec::with_capacity(k * ds.num_classes);
    for class in &members {
        for &node in class.choose_multiple(&mut rng, k) {
            is_labeled[node] = true;
            labeled.push(node);
        }
    }
    labeled.sort_unstable();

    let mut rest: Vec<usize> = (0..ds.num_nodes()).filter(|&i| !is_labeled[i]).collect();
    rest.shuffle(&mut rng);
    let n_val = if rest.len() > VALIDATION_SIZE {
        VALIDATION_SIZE
    } else {
        rest.len() / 5
    };
    let mut validation = rest[..n_val].to_vec();
    let mut test = rest[n_val..].to_vec();
    validation.sort_unstable();
    test.sort_unstable();

    Ok(SplitSpec {
        labeled,
        validation,
        test,
        labels_per_class: k,
        seed,
    })
}

/// Gaussian blobs with a kNN graph (`k = 7`, unit weights).
///
/// Class centers are random directions scaled to length `separation`;
/// points scatter around them with unit variance.
pub fn make_blobs(n_per_class: usize, num_classes: usize, dim: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if n_per_class == 0 || num_classes == 0 || dim == 0 {
        return Err(Error::InvalidParameter("blob sizes must be positive".into()));
    }
    let n = n_per_class * num_classes;
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = Array2::<f64>::zeros((num_classes, dim));
    for mut center in centers.axis_iter_mut(Axis(0)) {
        center.mapv_inplace(|_| StandardNormal.sample(&mut rng));
        let norm = center.dot(&center).sqrt().max(f64::MIN_POSITIVE);
        center *= separation / norm;
    }
    let mut features = Array2::<f64>::zeros((n, dim));
    let mut labels = Vec::with_capacity(n);
    for (i, mut row) in features.axis_iter_mut(Axis(0)).enumerate() {
        let class = i / n_per_class;
        for (x, &c) in row.iter_mut().zip(centers.row(class)) {
            let noise: f64 = StandardNormal.sample(&mut rng);
            *x = c + noise;
        }
        labels.push(class);
    }
    let graph = knn_graph(features.view(), 7.min(n - 1), KnnWeighting::Unit)?;
    Dataset::new("blobs", graph, features, labels, num_classes)
}

/// Parameters of a planted-partition graph with bag-of-words features,
/// a small stand-in for citation networks.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedPartition {
    pub nodes_per_class: usize,
    pub num_classes: usize,
    /// Expected number of same-class neighbors per node.
    pub intra_degree: f64,
    /// Expected number of other-class neighbors per node.
    pub inter_degree: f64,
    pub vocabulary: usize,
    pub words_per_node: usize,
    /// Probability that a word is drawn from the node's class vocabulary.
    pub topic_purity: f64,
    pub seed: u64,
}

impl Default for PlantedPartition {
    fn default() -> Self {
        Self {
            nodes_per_class: 100,
            num_classes: 7,
            intra_degree: 3.0,
            inter_degree: 0.6,
            vocabulary: 350,
            words_per_node: 12,
            topic_purity: 0.35,
            seed: 0,
        }
    }
}

pub fn make_planted_partition(cfg: &PlantedPartition) -> Result<Dataset> {
    let c = cfg.num_classes;
    let n = cfg.nodes_per_class * c;
    if n < 2 || c == 0 || cfg.vocabulary < c {
        return Err(Error::InvalidParameter("planted partition is too small".into()));
    }
    if !(0.0..=1.0).contains(&cfg.topic_purity) {
        return Err(Error::InvalidParameter("topic_purity must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let labels: Vec<usize> = (0..n).map(|i| i / cfg.nodes_per_class).collect();

    let same = cfg.nodes_per_class.saturating_sub(1).max(1) as f64;
    let other = (n - cfg.nodes_per_class).max(1) as f64;
    let p_in = (cfg.intra_degree / same).min(1.0);
    let p_out = (cfg.inter_degree / other).min(1.0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let graph = SparseGraph::from_unweighted_edges(n, &edges)?;

    let block = cfg.vocabulary / c;
    let mut features = Array2::<f64>::zeros((n, cfg.vocabulary));
    for (node, &y) in labels.iter().enumerate() {
        for _ in 0..cfg.words_per_node {
            let word = if rng.random::<f64>() < cfg.topic_purity {
                y * block + rng.random_range(0..block)
            } else {
                rng.random_range(0..cfg.vocabulary)
            };
            features[[node, word]] = 1.0;
        }
    }
    Dataset::new("planted", graph, features, labels, c)
}
