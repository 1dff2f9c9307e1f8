//! Labelled instances, their CSV form, and the preprocessing steps applied
//! before training: deduplication, stratified splitting, min-max scaling and
//! feature selection.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use sha2::{Digest, Sha256};

use crate::metrics::{feature_names, FEATURE_COUNT};
use crate::miner::MinedInstance;
use crate::rng;

pub const FORMAT_VERSION: u32 = 1;
const FORMAT_LINE: &str = "# dataset-format: 1";
const KEY_COLUMNS: [&str; 5] = ["project", "commit", "class", "method", "label"];

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed dataset: {0}")]
    Format(String),
    #[error("class {0} has no instances")]
    EmptyClass(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub instances: Vec<MinedInstance>,
    /// `# key: value` lines written after the format line.
    pub metadata: Vec<(String, String)>,
}

impl Dataset {
    pub fn new(instances: Vec<MinedInstance>) -> Self {
        Dataset { feature_names: feature_names(), instances, metadata: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// `(positives, negatives)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.instances.iter().filter(|i| i.label).count();
        (pos, self.instances.len() - pos)
    }

    pub fn features(&self) -> Vec<Vec<f64>> {
        self.instances.iter().map(|i| i.features.clone()).collect()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.instances.iter().map(|i| i.label).collect()
    }

    fn with_instances(&self, instances: Vec<MinedInstance>) -> Dataset {
        Dataset { feature_names: self.feature_names.clone(), instances, metadata: self.metadata.clone() }
    }

    /// Instances grouped by project id, in id order.
    pub fn by_project(&self) -> BTreeMap<String, Dataset> {
        let mut groups: BTreeMap<String, Vec<MinedInstance>> = BTreeMap::new();
        for inst in &self.instances {
            groups.entry(inst.project.clone()).or_default().push(inst.clone());
        }
        groups.into_iter().map(|(k, v)| (k, self.with_instances(v))).collect()
    }

    /// Concatenation of two datasets; metadata is taken from `self`.
    pub fn merged(&self, other: &Dataset) -> Dataset {
        let mut all = self.instances.clone();
        all.extend(other.instances.iter().cloned());
        self.with_instances(all)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(FORMAT_LINE);
        out.push('\n');
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let header: Vec<&str> = KEY_COLUMNS.iter().copied().chain(self.feature_names.iter().map(String::as_str)).collect();
        w.write_record(&header).expect("in-memory write");
        for inst in &self.instances {
            let mut record = vec![
                inst.project.clone(),
                inst.commit.clone(),
                inst.class.clone(),
                inst.method.clone(),
                if inst.label { "1".into() } else { "0".into() },
            ];
            record.extend(inst.features.iter().map(|v| format!("{v}")));
            w.write_record(&record).expect("in-memory write");
        }
        out.push_str(std::str::from_utf8(&w.into_inner().expect("in-memory flush")).expect("utf-8 fields"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Dataset, DatasetError> {
        let mut lines = text.split_inclusive('\n');
        let first = lines.next().unwrap_or("").trim_end();
        if first != FORMAT_LINE {
            return Err(DatasetError::Format(format!("expected `{FORMAT_LINE}` as first line")));
        }
        let mut metadata = Vec::new();
        let mut offset = first.len() + 1;
        for line in lines {
            let Some(meta) = line.strip_prefix("# ") else { break };
            let (k, v) = meta
                .trim_end()
                .split_once(": ")
                .ok_or_else(|| DatasetError::Format(format!("bad metadata line `{}`", line.trim_end())))?;
            metadata.push((k.to_string(), v.to_string()));
            offset += line.len();
        }

        let mut reader = csv::ReaderBuilder::new().from_reader(text[offset.min(text.len())..].as_bytes());
        let header = reader.headers().map_err(|e| DatasetError::Format(e.to_string()))?.clone();
        let names: Vec<&str> = header.iter().collect();
        if names.len() != KEY_COLUMNS.len() + FEATURE_COUNT || names[..KEY_COLUMNS.len()] != KEY_COLUMNS {
            return Err(DatasetError::Format("unexpected header".into()));
        }
        let feature_names: Vec<String> = names[KEY_COLUMNS.len()..].iter().map(|s| s.to_string()).collect();
        if feature_names != self::feature_names() {
            return Err(DatasetError::Format("feature columns differ from the metric set".into()));
        }

        let mut instances = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| DatasetError::Format(e.to_string()))?;
            let label = match &record[4] {
                "1" => true,
                "0" => false,
                other => return Err(DatasetError::Format(format!("row {}: label `{other}`", row + 1))),
            };
            let features = record
                .iter()
                .skip(KEY_COLUMNS.len())
                .map(|v| v.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| DatasetError::Format(format!("row {}: {e}", row + 1)))?;
            instances.push(MinedInstance {
                project: record[0].to_string(),
                commit: record[1].to_string(),
                class: record[2].to_string(),
                method: record[3].to_string(),
                label,
                features,
            });
        }
        Ok(Dataset { feature_names, instances, metadata })
    }

    pub fn read(path: &Path) -> Result<Dataset, DatasetError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
        Dataset::from_csv(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), DatasetError> {
        std::fs::write(path, self.to_csv()).map_err(|source| DatasetError::Io { path: path.display().to_string(), source })
    }

    /// SHA-256 of the CSV serialization, hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_csv().as_bytes()))
    }
}

fn vector_key(features: &[f64]) -> Vec<u64> {
    features.iter().map(|v| v.to_bits()).collect()
}

/// Collapses exact duplicates and drops vectors that occur with both labels.
pub fn deduplicate(dataset: &Dataset) -> Dataset {
    let mut labels_seen: HashMap<Vec<u64>, (bool, bool)> = HashMap::new();
    for inst in &dataset.instances {
        let entry = labels_seen.entry(vector_key(&inst.features)).or_default();
        if inst.label {
            entry.0 = true;
        } else {
            entry.1 = true;
        }
    }
    let mut kept = Vec::new();
    let mut emitted: HashMap<Vec<u64>, ()> = HashMap::new();
    let mut conflicts = 0usize;
    for inst in &dataset.instances {
        let key = vector_key(&inst.features);
        if labels_seen[&key] == (true, true) {
            conflicts += 1;
            continue;
        }
        if emitted.insert(key, ()).is_none() {
            kept.push(inst.clone());
        }
    }
    if conflicts > 0 {
        log::warn!("dropped {conflicts} rows whose feature vector carries both labels");
    }
    dataset.with_instances(kept)
}

/// Splits each class separately: `round(n × test_fraction)` (at least one)
/// members go to the test side. Both sides keep the input order.
pub fn stratified_split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset), DatasetError> {
    let mut in_test = vec![false; dataset.len()];
    for (stream, label, name) in [(0u64, true, "positive"), (1, false, "negative")] {
        let mut members: Vec<usize> = (0..dataset.len()).filter(|&i| dataset.instances[i].label == label).collect();
        if members.is_empty() {
            return Err(DatasetError::EmptyClass(name));
        }
        members.shuffle(&mut rng::stream(seed, stream));
        let take = ((members.len() as f64 * test_fraction).round() as usize).max(1);
        for &i in members.iter().take(take) {
            in_test[i] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (inst, t) in dataset.instances.iter().zip(in_test) {
        if t {
            test.push(inst.clone());
        } else {
            train.push(inst.clone());
        }
    }
    Ok((dataset.with_instances(train), dataset.with_instances(test)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaler {
    /// `(x − min)/(max − min)`; constant features map to 0 and values
    /// outside the fitted range are not clamped.
    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 })
            .collect()
    }
}

pub fn fit_minmax(rows: &[Vec<f64>]) -> Scaler {
    assert!(!rows.is_empty(), "cannot fit a scaler on no rows");
    let d = rows[0].len();
    let mut min = vec![f64::INFINITY; d];
    let mut max = vec![f64::NEG_INFINITY; d];
    for row in rows {
        for (j, &v) in row.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    Scaler { min, max }
}

pub fn apply_scaler(scaler: &Scaler, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| scaler.transform(r)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMask {
    pub selected: Vec<bool>,
}

impl FeatureMask {
    pub fn all(d: usize) -> Self {
        FeatureMask { selected: vec![true; d] }
    }

    pub fn k(&self) -> usize {
        self.selected.iter().filter(|&&s| s).count()
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.selected.len()).filter(|&i| self.selected[i]).collect()
    }

    pub fn project(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(&self.selected).filter(|(_, &s)| s).map(|(&v, _)| v).collect()
    }
}

/// Between-class separation of one feature: squared difference of class
/// means over the pooled within-class variance. A feature that is constant
/// inside each class but differs between them separates perfectly and
/// scores `+∞`; one that is constant overall scores 0.
pub fn separation_score(values: &[f64], labels: &[bool]) -> f64 {
    let mut sums = [(0.0f64, 0usize); 2];
    for (&v, &y) in values.iter().zip(labels) {
        let s = &mut sums[y as usize];
        s.0 += v;
        s.1 += 1;
    }
    if sums[0].1 == 0 || sums[1].1 == 0 {
        return 0.0;
    }
    let means = [sums[0].0 / sums[0].1 as f64, sums[1].0 / sums[1].1 as f64];
    let ss: f64 = values.iter().zip(labels).map(|(&v, &y)| (v - means[y as usize]).powi(2)).sum();
    let dof = values.len().saturating_sub(2).max(1);
    let pooled = ss / dof as f64;
    let diff = (means[1] - means[0]).powi(2);
    if pooled == 0.0 {
        return if diff > 0.0 { f64::INFINITY } else { 0.0 };
    }
    diff / pooled
}

/// Keeps the `k` best-separating features; ties go to the lower index.
pub fn select_features(rows: &[Vec<f64>], labels: &[bool], k: usize) -> FeatureMask {
    assert!(!rows.is_empty() && k >= 1);
    let d = rows[0].len();
    let scores: Vec<f64> = (0..d)
        .map(|j| {
            let column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            separation_score(&column, labels)
        })
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut selected = vec![false; d];
    for &j in order.iter().take(k.min(d)) {
        selected[j] = true;
    }
    FeatureMask { selected }
}
