//! Binary classifiers: decision tree, random forest, logistic regression,
//! linear SVM and Gaussian naive Bayes, plus cross-validated grid search.
//!
//! Every model maps a feature vector to a score in `[0, 1]`; the label is
//! `score >= 0.5`.

pub mod bayes;
pub mod cv;
pub mod forest;
pub mod logistic;
pub mod svm;
pub mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub use cv::{grid_search, stratified_kfold, train_production, GridSearchResult};

use crate::dataset::FeatureMask;

pub const SCORE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnError {
    #[error("training data holds a single class")]
    SingleClassData,
    #[error("training data is empty")]
    EmptyData,
    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown hyperparameter `{key}` for {kind}")]
    UnknownHyperparameter { kind: AlgorithmKind, key: String },
    #[error("invalid value `{value}` for hyperparameter `{key}`")]
    InvalidHyperparameter { key: String, value: String },
    #[error("{class} class has {have} instances, {need} folds need at least {need}")]
    TooFewInstances { class: &'static str, have: usize, need: usize },
    #[error("empty hyperparameter space")]
    EmptySpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgorithmKind {
    Rf,
    Dt,
    Lr,
    Svm,
    Nb,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [Self::Rf, Self::Dt, Self::Lr, Self::Svm, Self::Nb];

    pub fn name(self) -> &'static str {
        match self {
            Self::Rf => "rf",
            Self::Dt => "dt",
            Self::Lr => "lr",
            Self::Svm => "svm",
            Self::Nb => "nb",
        }
    }

    fn defaults(self) -> Vec<(&'static str, HyperValue)> {
        use HyperValue::*;
        match self {
            Self::Dt => vec![("max_depth", Unbounded), ("min_samples_split", Int(2)), ("min_samples_leaf", Int(1))],
            Self::Rf => vec![
                ("ntrees", Int(100)),
                ("max_depth", Unbounded),
                ("max_features", Text("sqrt".into())),
                ("bootstrap", Bool(true)),
                ("min_samples_split", Int(2)),
                ("min_samples_leaf", Int(1)),
            ],
            Self::Lr => vec![
                ("lambda", Real(0.01)),
                ("learning_rate", Real(0.1)),
                ("epochs", Int(500)),
                ("k_features", Int(30)),
            ],
            Self::Svm => vec![("lambda", Real(0.001)), ("epochs", Int(200))],
            Self::Nb => vec![("var_smoothing", Real(1e-9))],
        }
    }

    /// The default search space, first key varying slowest.
    pub fn default_space(self) -> Space {
        use HyperValue::*;
        let grid: Vec<(&str, Vec<HyperValue>)> = match self {
            Self::Dt => vec![
                ("max_depth", vec![Int(3), Int(6), Int(12), Unbounded]),
                ("min_samples_split", vec![Int(2), Int(10)]),
                ("min_samples_leaf", vec![Int(1), Int(5)]),
            ],
            Self::Rf => vec![
                ("ntrees", vec![Int(50), Int(100)]),
                ("max_depth", vec![Int(6), Int(12), Unbounded]),
                ("max_features", vec![Text("sqrt".into()), Text("all".into())]),
            ],
            Self::Lr => vec![("lambda", vec![Real(0.001), Real(0.01), Real(0.1), Real(1.0)])],
            Self::Svm => vec![("lambda", vec![Real(0.0001), Real(0.001), Real(0.01)])],
            Self::Nb => vec![("var_smoothing", vec![Real(1e-9)])],
        };
        Space { axes: grid.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HyperValue {
    Int(u64),
    Real(f64),
    Bool(bool),
    Text(String),
    /// No limit (e.g. unbounded tree depth).
    Unbounded,
}

impl fmt::Display for HyperValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperValue::Int(v) => write!(f, "{v}"),
            HyperValue::Real(v) => write!(f, "{v:?}"),
            HyperValue::Bool(v) => write!(f, "{v}"),
            HyperValue::Text(v) => f.write_str(v),
            HyperValue::Unbounded => f.write_str("none"),
        }
    }
}

impl HyperValue {
    pub fn parse(text: &str) -> HyperValue {
        match text {
            "none" => HyperValue::Unbounded,
            "true" => HyperValue::Bool(true),
            "false" => HyperValue::Bool(false),
            _ => {
                if let Ok(v) = text.parse::<u64>() {
                    HyperValue::Int(v)
                } else if let Ok(v) = text.parse::<f64>() {
                    HyperValue::Real(v)
                } else {
                    HyperValue::Text(text.to_string())
                }
            }
        }
    }
}

pub type Hyperparameters = BTreeMap<String, HyperValue>;

/// A grid of hyperparameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    pub axes: Vec<(String, Vec<HyperValue>)>,
}

impl Space {
    pub fn single(params: Hyperparameters) -> Space {
        Space { axes: params.into_iter().map(|(k, v)| (k, vec![v])).collect() }
    }

    /// Every combination, the last axis varying fastest.
    pub fn combinations(&self) -> Vec<Hyperparameters> {
        let mut out = vec![Hyperparameters::new()];
        for (key, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|base| {
                    values.iter().map(move |v| {
                        let mut next = base.clone();
                        next.insert(key.clone(), v.clone());
                        next
                    })
                })
                .collect();
        }
        if self.axes.iter().any(|(_, v)| v.is_empty()) {
            return Vec::new();
        }
        out
    }
}

/// An algorithm with a complete, validated set of hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    pub params: Hyperparameters,
}

impl AlgorithmSpec {
    /// Fills in defaults; unknown keys and ill-typed values are rejected.
    pub fn new(kind: AlgorithmKind, overrides: Hyperparameters) -> Result<Self, LearnError> {
        let mut params: Hyperparameters = kind.defaults().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        for (key, value) in overrides {
            let Some(default) = params.get(&key) else {
                return Err(LearnError::UnknownHyperparameter { kind, key });
            };
            let value = coerce(&key, default, value)?;
            params.insert(key, value);
        }
        Ok(AlgorithmSpec { kind, params })
    }

    pub fn default_for(kind: AlgorithmKind) -> Self {
        Self::new(kind, Hyperparameters::new()).expect("defaults are valid")
    }

    fn int(&self, key: &str) -> usize {
        match self.params[key] {
            HyperValue::Int(v) => v as usize,
            _ => unreachable!("validated at construction"),
        }
    }

    fn real(&self, key: &str) -> f64 {
        match self.params[key] {
            HyperValue::Real(v) => v,
            HyperValue::Int(v) => v as f64,
            _ => unreachable!("validated at construction"),
        }
    }

    fn limit(&self, key: &str) -> Option<usize> {
        match self.params[key] {
            HyperValue::Int(v) => Some(v as usize),
            _ => None,
        }
    }

    fn flag(&self, key: &str) -> bool {
        matches!(self.params[key], HyperValue::Bool(true))
    }

    fn text(&self, key: &str) -> &str {
        match &self.params[key] {
            HyperValue::Text(v) => v,
            _ => unreachable!("validated at construction"),
        }
    }
}

fn coerce(key: &str, default: &HyperValue, value: HyperValue) -> Result<HyperValue, LearnError> {
    let invalid = || LearnError::InvalidHyperparameter { key: key.to_string(), value: value.to_string() };
    let ok = match (default, &value) {
        (HyperValue::Real(_), HyperValue::Int(v)) => return Ok(HyperValue::Real(*v as f64)),
        (HyperValue::Real(_), HyperValue::Real(v)) => v.is_finite() && *v >= 0.0,
        (HyperValue::Int(_), HyperValue::Int(_)) => true,
        (HyperValue::Unbounded | HyperValue::Int(_), HyperValue::Unbounded) => key == "max_depth",
        (HyperValue::Unbounded, HyperValue::Int(_)) => true,
        (HyperValue::Bool(_), HyperValue::Bool(_)) => true,
        (HyperValue::Text(_), HyperValue::Text(t)) => key == "max_features" && (t == "sqrt" || t == "all"),
        _ => false,
    };
    if !ok {
        return Err(invalid());
    }
    if key == "ntrees" && value == HyperValue::Int(0) {
        return Err(invalid());
    }
    if (key == "k_features" || key == "min_samples_leaf") && value == HyperValue::Int(0) {
        return Err(invalid());
    }
    Ok(value)
}

/// Learned parameters of one of the five model families.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Tree(tree::DecisionTree),
    Forest(forest::RandomForest),
    Logistic(logistic::LogisticModel),
    Svm(svm::LinearSvm),
    Bayes(bayes::GaussianNb),
}

impl Model {
    fn score(&self, x: &[f64]) -> f64 {
        match self {
            Model::Tree(m) => m.score(x),
            Model::Forest(m) => m.score(x),
            Model::Logistic(m) => m.score(x),
            Model::Svm(m) => m.score(x),
            Model::Bayes(m) => m.score(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub spec: AlgorithmSpec,
    pub model: Model,
    pub seed: u64,
    /// Number of input features the model expects.
    pub dimension: usize,
    /// `"production"` for models refit on all data.
    pub tag: String,
}

impl TrainedModel {
    /// Features the model reads; only logistic regression selects a subset.
    pub fn mask(&self) -> FeatureMask {
        match &self.model {
            Model::Logistic(m) => m.mask.clone(),
            _ => FeatureMask::all(self.dimension),
        }
    }

    pub fn score(&self, x: &[f64]) -> Result<f64, LearnError> {
        if x.len() != self.dimension {
            return Err(LearnError::DimensionMismatch { expected: self.dimension, got: x.len() });
        }
        Ok(self.model.score(x))
    }
}

pub fn predict(model: &TrainedModel, features: &[f64]) -> Result<(bool, f64), LearnError> {
    let score = model.score(features)?;
    Ok((score >= SCORE_THRESHOLD, score))
}

pub fn train(spec: &AlgorithmSpec, x: &[Vec<f64>], y: &[bool], seed: u64) -> Result<TrainedModel, LearnError> {
    if x.is_empty() {
        return Err(LearnError::EmptyData);
    }
    if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
        return Err(LearnError::SingleClassData);
    }
    let dimension = x[0].len();
    if let Some(bad) = x.iter().find(|r| r.len() != dimension) {
        return Err(LearnError::DimensionMismatch { expected: dimension, got: bad.len() });
    }
    let model = match spec.kind {
        AlgorithmKind::Dt => Model::Tree(tree::DecisionTree::fit(x, y, &tree::TreeParams::from_spec(spec), seed)),
        AlgorithmKind::Rf => Model::Forest(forest::RandomForest::fit(x, y, spec, seed)),
        AlgorithmKind::Lr => Model::Logistic(logistic::LogisticModel::fit(
            x,
            y,
            spec.real("lambda"),
            spec.real("learning_rate"),
            spec.int("epochs"),
            spec.int("k_features"),
        )),
        AlgorithmKind::Svm => Model::Svm(svm::LinearSvm::fit(x, y, spec.real("lambda"), spec.int("epochs"))),
        AlgorithmKind::Nb => Model::Bayes(bayes::GaussianNb::fit(x, y, spec.real("var_smoothing"))),
    };
    Ok(TrainedModel { spec: spec.clone(), model, seed, dimension, tag: "trained".into() })
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_and_ill_typed_keys_are_rejected() {
        let mut p = Hyperparameters::new();
        p.insert("depth".into(), HyperValue::Int(3));
        assert!(matches!(AlgorithmSpec::new(AlgorithmKind::Dt, p), Err(LearnError::UnknownHyperparameter { .. })));
        let mut p = Hyperparameters::new();
        p.insert("max_features".into(), HyperValue::Text("half".into()));
        assert!(AlgorithmSpec::new(AlgorithmKind::Rf, p).is_err());
        let mut p = Hyperparameters::new();
        p.insert("lambda".into(), HyperValue::Int(1));
        assert_eq!(AlgorithmSpec::new(AlgorithmKind::Lr, p).unwrap().params["lambda"], HyperValue::Real(1.0));
    }

    #[test]
    fn hyper_values_round_trip_through_text() {
        for v in [
            HyperValue::Int(12),
            HyperValue::Real(1.0),
            HyperValue::Real(1e-9),
            HyperValue::Real(0.001),
            HyperValue::Bool(false),
            HyperValue::Text("sqrt".into()),
            HyperValue::Unbounded,
        ] {
            assert_eq!(HyperValue::parse(&v.to_string()), v);
        }
    }

    #[test]
    fn grid_enumeration_order() {
        let space = AlgorithmKind::Dt.default_space();
        let combos = space.combinations();
        assert_eq!(combos.len(), 16);
        assert_eq!(combos[0]["max_depth"], HyperValue::Int(3));
        assert_eq!(combos[1]["min_samples_leaf"], HyperValue::Int(5));
        assert_eq!(combos[15]["max_depth"], HyperValue::Unbounded);
        assert_eq!(AlgorithmKind::Rf.default_space().combinations().len(), 12);
    }

    #[test]
    fn single_class_rejected() {
        let x = vec![vec![0.0], vec![1.0]];
        for kind in AlgorithmKind::ALL {
            let err = train(&AlgorithmSpec::default_for(kind), &x, &[true, true], 1).unwrap_err();
            assert_eq!(err, LearnError::SingleClassData);
        }
    }

    #[test]
    fn dimension_checked_at_predict() {
        let x = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let m = train(&AlgorithmSpec::default_for(AlgorithmKind::Nb), &x, &[true, false], 1).unwrap();
        assert!(matches!(predict(&m, &[0.0]), Err(LearnError::DimensionMismatch { expected: 2, got: 1 })));
    }
}
