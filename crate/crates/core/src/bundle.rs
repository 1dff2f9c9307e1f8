//! Versioned text format for a trained model together with its scaler,
//! feature mask and provenance. See `docs/model-bundle.md`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::dataset::{FeatureMask, Scaler};
use crate::learners::bayes::GaussianNb;
use crate::learners::forest::RandomForest;
use crate::learners::logistic::LogisticModel;
use crate::learners::svm::LinearSvm;
use crate::learners::tree::{DecisionTree, Node};
use crate::learners::{
    predict, AlgorithmKind, AlgorithmSpec, HyperValue, Hyperparameters, LearnError, Model, TrainedModel,
};
use crate::metrics::FEATURE_COUNT;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "# refscout model bundle";

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("corrupt bundle: {0}")]
    Format(String),
    #[error("unsupported bundle format_version {found} (supported: {FORMAT_VERSION})")]
    Version { found: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub format_version: u32,
    pub model: TrainedModel,
    pub scaler: Scaler,
    pub feature_names: Vec<String>,
    pub dataset_hash: String,
    /// Seconds since the Unix epoch; left out of the file when `None`.
    pub timestamp: Option<String>,
}

impl ModelBundle {
    pub fn new(model: TrainedModel, scaler: Scaler, feature_names: Vec<String>, dataset_hash: String) -> Self {
        ModelBundle { format_version: FORMAT_VERSION, model, scaler, feature_names, dataset_hash, timestamp: None }
    }

    pub fn stamp_now(&mut self) {
        let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        self.timestamp = Some(secs.to_string());
    }

    pub fn mask(&self) -> FeatureMask {
        self.model.mask()
    }

    /// Scales raw metric values and scores them.
    pub fn predict(&self, raw: &[f64]) -> Result<(bool, f64), LearnError> {
        if raw.len() != self.scaler.min.len() {
            return Err(LearnError::DimensionMismatch { expected: self.scaler.min.len(), got: raw.len() });
        }
        predict(&self.model, &self.scaler.transform(raw))
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn nums(values: &[f64]) -> String {
    values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(" ")
}

fn write_tree(out: &mut String, prefix: &str, tree: &DecisionTree) {
    let _ = writeln!(out, "{prefix}.nodes = {}", tree.nodes.len());
    for (i, node) in tree.nodes.iter().enumerate() {
        let body = match node {
            Node::Leaf { positive } => format!("leaf {}", num(*positive)),
            Node::Split { feature, threshold, left, right } => {
                format!("split {feature} {} {left} {right}", num(*threshold))
            }
        };
        let _ = writeln!(out, "{prefix}.node.{i} = {body}");
    }
}

pub fn serialize(bundle: &ModelBundle) -> String {
    let m = &bundle.model;
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "format_version = {}", bundle.format_version);
    let _ = writeln!(out, "algorithm = {}", m.spec.kind);
    let _ = writeln!(out, "tag = {}", m.tag);
    let _ = writeln!(out, "seed = {}", m.seed);
    let _ = writeln!(out, "dataset_hash = {}", bundle.dataset_hash);
    if let Some(ts) = &bundle.timestamp {
        let _ = writeln!(out, "timestamp = {ts}");
    }
    for (k, v) in &m.spec.params {
        let _ = writeln!(out, "hyper.{k} = {v}");
    }
    let _ = writeln!(out, "features = {}", bundle.feature_names.len());
    for (i, name) in bundle.feature_names.iter().enumerate() {
        let _ = writeln!(out, "feature.{i} = {name}");
    }
    let _ = writeln!(out, "scaler.min = {}", nums(&bundle.scaler.min));
    let _ = writeln!(out, "scaler.max = {}", nums(&bundle.scaler.max));
    let mask: Vec<&str> = m.mask().selected.iter().map(|&s| if s { "1" } else { "0" }).collect();
    let _ = writeln!(out, "mask = {}", mask.join(" "));
    match &m.model {
        Model::Tree(t) => write_tree(&mut out, "tree", t),
        Model::Forest(f) => {
            let _ = writeln!(out, "forest.trees = {}", f.trees.len());
            for (t, (tree, seed)) in f.trees.iter().zip(&f.seeds).enumerate() {
                let _ = writeln!(out, "forest.tree.{t}.seed = {seed}");
                write_tree(&mut out, &format!("forest.tree.{t}"), tree);
            }
        }
        Model::Logistic(l) => {
            let _ = writeln!(out, "linear.weights = {}", nums(&l.weights));
            let _ = writeln!(out, "linear.bias = {}", num(l.bias));
        }
        Model::Svm(s) => {
            let _ = writeln!(out, "linear.weights = {}", nums(&s.weights));
            let _ = writeln!(out, "linear.bias = {}", num(s.bias));
        }
        Model::Bayes(nb) => {
            let _ = writeln!(out, "nb.priors = {}", nums(&nb.priors));
            for c in 0..2 {
                let _ = writeln!(out, "nb.mean.{c} = {}", nums(&nb.means[c]));
                let _ = writeln!(out, "nb.var.{c} = {}", nums(&nb.variances[c]));
            }
        }
    }
    out.push_str("end\n");
    out
}

struct Doc {
    values: HashMap<String, String>,
}

fn corrupt(msg: impl Into<String>) -> BundleError {
    BundleError::Format(msg.into())
}

impl Doc {
    fn get(&self, key: &str) -> Result<&str, BundleError> {
        self.values.get(key).map(String::as_str).ok_or_else(|| corrupt(format!("missing `{key}`")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T, BundleError> {
        self.get(key)?.parse().map_err(|_| corrupt(format!("bad value for `{key}`")))
    }

    fn floats(&self, key: &str, len: usize) -> Result<Vec<f64>, BundleError> {
        let text = self.get(key)?;
        let v = text
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| corrupt(format!("bad number in `{key}`")))?;
        if v.len() != len {
            return Err(corrupt(format!("`{key}` has {} values, expected {len}", v.len())));
        }
        Ok(v)
    }

    fn tree(&self, prefix: &str) -> Result<DecisionTree, BundleError> {
        let n: usize = self.parse(&format!("{prefix}.nodes"))?;
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let key = format!("{prefix}.node.{i}");
            let parts: Vec<&str> = self.get(&key)?.split_whitespace().collect();
            let bad = || corrupt(format!("bad node `{key}`"));
            let node = match parts.as_slice() {
                ["leaf", p] => Node::Leaf { positive: p.parse().map_err(|_| bad())? },
                ["split", f, t, l, r] => {
                    let (left, right): (usize, usize) = (l.parse().map_err(|_| bad())?, r.parse().map_err(|_| bad())?);
                    if left >= n || right >= n || left <= i || right <= i {
                        return Err(bad());
                    }
                    Node::Split {
                        feature: f.parse().map_err(|_| bad())?,
                        threshold: t.parse().map_err(|_| bad())?,
                        left,
                        right,
                    }
                }
                _ => return Err(bad()),
            };
            nodes.push(node);
        }
        if nodes.is_empty() {
            return Err(corrupt(format!("`{prefix}` has no nodes")));
        }
        Ok(DecisionTree { nodes })
    }
}

pub fn deserialize(text: &str) -> Result<ModelBundle, BundleError> {
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(corrupt("missing bundle header"));
    }
    let mut values = HashMap::new();
    let mut ended = false;
    for line in lines {
        if line == "end" {
            ended = true;
            break;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once(" = ").ok_or_else(|| corrupt(format!("bad line `{line}`")))?;
        values.insert(k.to_string(), v.to_string());
    }
    let doc = Doc { values };
    let version = doc.get("format_version")?;
    if version != FORMAT_VERSION.to_string() {
        return Err(BundleError::Version { found: version.to_string() });
    }
    if !ended {
        return Err(corrupt("truncated: no `end` line"));
    }

    let kind: AlgorithmKind = doc.get("algorithm")?.parse().map_err(corrupt)?;
    let mut params = Hyperparameters::new();
    for (k, v) in &doc.values {
        if let Some(name) = k.strip_prefix("hyper.") {
            params.insert(name.to_string(), HyperValue::parse(v));
        }
    }
    let spec = AlgorithmSpec::new(kind, params).map_err(|e| corrupt(e.to_string()))?;

    let d: usize = doc.parse("features")?;
    if d != FEATURE_COUNT {
        return Err(corrupt(format!("expected {FEATURE_COUNT} features, found {d}")));
    }
    let feature_names = (0..d).map(|i| doc.get(&format!("feature.{i}")).map(str::to_string)).collect::<Result<Vec<_>, _>>()?;
    let scaler = Scaler { min: doc.floats("scaler.min", d)?, max: doc.floats("scaler.max", d)? };
    let selected = doc
        .get("mask")?
        .split_whitespace()
        .map(|t| match t {
            "1" => Ok(true),
            "0" => Ok(false),
            _ => Err(corrupt("bad mask")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if selected.len() != d || !selected.contains(&true) {
        return Err(corrupt("bad mask"));
    }
    let mask = FeatureMask { selected };

    let model = match kind {
        AlgorithmKind::Dt => Model::Tree(doc.tree("tree")?),
        AlgorithmKind::Rf => {
            let n: usize = doc.parse("forest.trees")?;
            let mut trees = Vec::with_capacity(n);
            let mut seeds = Vec::with_capacity(n);
            for t in 0..n {
                seeds.push(doc.parse(&format!("forest.tree.{t}.seed"))?);
                trees.push(doc.tree(&format!("forest.tree.{t}"))?);
            }
            if trees.is_empty() {
                return Err(corrupt("forest without trees"));
            }
            Model::Forest(RandomForest { trees, seeds })
        }
        AlgorithmKind::Lr => Model::Logistic(LogisticModel {
            weights: doc.floats("linear.weights", mask.k())?,
            bias: doc.floats("linear.bias", 1)?[0],
            mask,
        }),
        AlgorithmKind::Svm => {
            Model::Svm(LinearSvm { weights: doc.floats("linear.weights", d)?, bias: doc.floats("linear.bias", 1)?[0] })
        }
        AlgorithmKind::Nb => {
            let p = doc.floats("nb.priors", 2)?;
            Model::Bayes(GaussianNb {
                priors: [p[0], p[1]],
                means: [doc.floats("nb.mean.0", d)?, doc.floats("nb.mean.1", d)?],
                variances: [doc.floats("nb.var.0", d)?, doc.floats("nb.var.1", d)?],
            })
        }
    };
    if let Model::Tree(t) = &model {
        check_features(t, d)?;
    }
    if let Model::Forest(f) = &model {
        for t in &f.trees {
            check_features(t, d)?;
        }
    }

    Ok(ModelBundle {
        format_version: FORMAT_VERSION,
        model: TrainedModel { spec, model, seed: doc.parse("seed")?, dimension: d, tag: doc.get("tag")?.to_string() },
        scaler,
        feature_names,
        dataset_hash: doc.get("dataset_hash")?.to_string(),
        timestamp: doc.values.get("timestamp").cloned(),
    })
}

fn check_features(tree: &DecisionTree, d: usize) -> Result<(), BundleError> {
    for node in &tree.nodes {
        if let Node::Split { feature, .. } = node {
            if *feature >= d {
                return Err(corrupt("split on an unknown feature"));
            }
        }
    }
    Ok(())
}

/// Writes through a temporary file in the target directory, then renames.
pub fn save_bundle(bundle: &ModelBundle, path: &Path) -> Result<(), BundleError> {
    let io = |source| BundleError::Io { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(serialize(bundle).as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn load_bundle(path: &Path) -> Result<ModelBundle, BundleError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| BundleError::Io { path: path.display().to_string(), source })?;
    deserialize(&text)
}
