//! Model assessment: confusion-matrix scores, permutation importance,
//! leave-one-project-out and cross-corpus runs, and quartile summaries.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::dataset::{apply_scaler, fit_minmax, Dataset, Scaler};
use crate::learners::{grid_search, predict, train, AlgorithmKind, LearnError, Space, TrainedModel};
use crate::rng;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("leave-one-project-out needs at least 2 projects, found {0}")]
    TooFewProjects(usize),
    #[error("empty group `{0}`")]
    EmptyGroup(String),
    #[error("empty evaluation set")]
    EmptyTest,
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ConfusionMatrix {
    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Harmonic mean of precision and recall; 0 when both are 0.
    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl From<ConfusionMatrix> for EvaluationReport {
    fn from(c: ConfusionMatrix) -> Self {
        EvaluationReport { confusion: c, accuracy: c.accuracy(), precision: c.precision(), recall: c.recall(), f1: c.f1() }
    }
}

pub fn evaluate(model: &TrainedModel, x: &[Vec<f64>], y: &[bool]) -> Result<EvaluationReport, EvalError> {
    if x.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let mut c = ConfusionMatrix::default();
    for (row, &actual) in x.iter().zip(y) {
        c.record(predict(model, row)?.0, actual);
    }
    Ok(c.into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureImportance {
    pub index: usize,
    pub name: String,
    pub mean_drop: f64,
    pub std_drop: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceReport {
    pub repeats: usize,
    pub baseline_f1: f64,
    /// Sorted by mean drop, largest first; ties by feature index.
    pub features: Vec<FeatureImportance>,
}

/// F1 drop when one column at a time is shuffled, `repeats` times each.
pub fn permutation_importance(
    model: &TrainedModel,
    x: &[Vec<f64>],
    y: &[bool],
    names: &[String],
    repeats: usize,
    seed: u64,
) -> Result<ImportanceReport, EvalError> {
    let baseline = evaluate(model, x, y)?.f1;
    let d = model.dimension;
    let mut features: Vec<FeatureImportance> = (0..d)
        .into_par_iter()
        .map(|j| {
            let mut rng = rng::stream(seed, j as u64);
            let column: Vec<f64> = x.iter().map(|r| r[j]).collect();
            let mut rows = x.to_vec();
            let drops: Vec<f64> = (0..repeats)
                .map(|_| {
                    let mut shuffled = column.clone();
                    shuffled.shuffle(&mut rng);
                    for (r, v) in rows.iter_mut().zip(&shuffled) {
                        r[j] = *v;
                    }
                    let f1 = evaluate(model, &rows, y).map(|e| e.f1).unwrap_or(0.0);
                    baseline - f1
                })
                .collect();
            let (mean, std) = mean_std(&drops);
            FeatureImportance {
                index: j,
                name: names.get(j).cloned().unwrap_or_else(|| format!("f{j}")),
                mean_drop: mean,
                std_drop: std,
            }
        })
        .collect();
    features.sort_by(|a, b| b.mean_drop.total_cmp(&a.mean_drop).then(a.index.cmp(&b.index)));
    Ok(ImportanceReport { repeats, baseline_f1: baseline, features })
}

/// Mean and sample standard deviation (0 for fewer than two values).
fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Result of fitting on one dataset and scoring another.
#[derive(Debug, Clone)]
pub struct HoldoutResult {
    pub report: EvaluationReport,
    pub model: TrainedModel,
    pub scaler: Scaler,
}

/// Scaler fit, grid search and final fit on `train` only, then scoring of
/// `test` with the same scaler.
pub fn fit_and_evaluate(
    train_set: &Dataset,
    test_set: &Dataset,
    kind: AlgorithmKind,
    space: &Space,
    folds: usize,
    seed: u64,
) -> Result<HoldoutResult, EvalError> {
    if test_set.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    if train_set.is_empty() {
        return Err(LearnError::EmptyData.into());
    }
    let scaler = fit_minmax(&train_set.features());
    let tx = apply_scaler(&scaler, &train_set.features());
    let ty = train_set.labels();
    let search = grid_search(kind, space, &tx, &ty, folds, seed)?;
    let model = train(&search.best_spec(), &tx, &ty, seed)?;
    let report = evaluate(&model, &apply_scaler(&scaler, &test_set.features()), &test_set.labels())?;
    Ok(HoldoutResult { report, model, scaler })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanRow {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MeanRow {
    /// Unweighted arithmetic mean of each metric.
    pub fn of(reports: &[EvaluationReport]) -> MeanRow {
        let n = reports.len().max(1) as f64;
        let sum = |f: fn(&EvaluationReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        MeanRow { accuracy: sum(|r| r.accuracy), precision: sum(|r| r.precision), recall: sum(|r| r.recall), f1: sum(|r| r.f1) }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectResult {
    pub project: String,
    pub result: HoldoutResult,
}

#[derive(Debug, Clone)]
pub struct LooReport {
    pub projects: Vec<ProjectResult>,
    pub mean: MeanRow,
}

/// For every project: fit on all other projects, score on it.
pub fn leave_one_project_out(
    dataset: &Dataset,
    kind: AlgorithmKind,
    space: &Space,
    folds: usize,
    seed: u64,
) -> Result<LooReport, EvalError> {
    let groups = dataset.by_project();
    if groups.len() < 2 {
        return Err(EvalError::TooFewProjects(groups.len()));
    }
    let names: Vec<&String> = groups.keys().collect();
    let results: Vec<Result<ProjectResult, EvalError>> = names
        .par_iter()
        .map(|&held_out| {
            let mut rest: Option<Dataset> = None;
            for (name, group) in &groups {
                if name != held_out {
                    rest = Some(match rest {
                        None => group.clone(),
                        Some(acc) => acc.merged(group),
                    });
                }
            }
            let rest = rest.expect("at least one other project");
            let result = fit_and_evaluate(&rest, &groups[held_out], kind, space, folds, seed)?;
            Ok(ProjectResult { project: held_out.clone(), result })
        })
        .collect();
    let projects = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<EvaluationReport> = projects.iter().map(|p| p.result.report).collect();
    Ok(LooReport { mean: MeanRow::of(&reports), projects })
}

/// Fit on one corpus, score every instance of another.
pub fn cross_corpus_evaluate(
    train_corpus: &Dataset,
    test_corpus: &Dataset,
    kind: AlgorithmKind,
    space: &Space,
    folds: usize,
    seed: u64,
) -> Result<HoldoutResult, EvalError> {
    fit_and_evaluate(train_corpus, test_corpus, kind, space, folds, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSummary {
    pub metric: String,
    pub group: String,
    pub n: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Quantile by linear interpolation between closest ranks.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn distribution_summary(values: &[f64], metric: &str, group: &str) -> Result<DistributionSummary, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptyGroup(group.to_string()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(DistributionSummary {
        metric: metric.to_string(),
        group: group.to_string(),
        n: sorted.len(),
        median: quantile(&sorted, 0.5),
        q1: quantile(&sorted, 0.25),
        q3: quantile(&sorted, 0.75),
    })
}

/// Column for a short metric name. The size and complexity shortcuts refer
/// to the method-level columns; `tcc`/`lcc` exist only at class level. Full
/// column names are accepted as well.
pub fn metric_column(feature_names: &[String], metric: &str) -> Option<usize> {
    let column = match metric.to_ascii_lowercase().as_str() {
        "loc" => "method_Loc",
        "rfc" => "method_Rfc",
        "wmc" | "cc" => "method_Wmc",
        "uw" => "method_UniqueWordsQty",
        "cbo" => "method_Cbo",
        "tcc" => "TCC",
        "lcc" => "LCC",
        _ => metric,
    };
    feature_names.iter().position(|n| n == column)
}

/// Summaries of each metric for refactored and not-refactored instances.
pub fn distributions(dataset: &Dataset, metrics: &[String]) -> Result<Vec<DistributionSummary>, EvalError> {
    let mut out = Vec::new();
    for metric in metrics {
        let col = metric_column(&dataset.feature_names, metric).ok_or_else(|| EvalError::UnknownMetric(metric.clone()))?;
        for (label, group) in [(true, "refactored"), (false, "not-refactored")] {
            let values: Vec<f64> =
                dataset.instances.iter().filter(|i| i.label == label).map(|i| i.features[col]).collect();
            out.push(distribution_summary(&values, metric, group)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_formulas() {
        let c = ConfusionMatrix { tp: 9, fp: 1, fn_: 3, tn: 7 };
        assert!((c.accuracy() - 0.8).abs() < 1e-12);
        assert!((c.precision() - 0.9).abs() < 1e-12);
        assert!((c.recall() - 0.75).abs() < 1e-12);
        assert!((c.f1() - 0.818_181_818_181_818_2).abs() < 1e-12);
    }

    #[test]
    fn zero_division_rule() {
        let c = ConfusionMatrix { tp: 0, fp: 0, fn_: 4, tn: 6 };
        assert_eq!((c.precision(), c.recall(), c.f1()), (0.0, 0.0, 0.0));
        assert_eq!(ConfusionMatrix::default().accuracy(), 0.0);
    }

    #[test]
    fn quartiles() {
        let s = distribution_summary(&[1.0, 2.0, 3.0, 4.0, 5.0], "m", "g").unwrap();
        assert_eq!((s.median, s.q1, s.q3), (3.0, 2.0, 4.0));
        let s = distribution_summary(&[5.0], "m", "g").unwrap();
        assert_eq!((s.median, s.q1, s.q3), (5.0, 5.0, 5.0));
        let s = distribution_summary(&[4.0, 1.0, 3.0, 2.0], "m", "g").unwrap();
        assert_eq!((s.median, s.q1, s.q3), (2.5, 1.75, 3.25));
        assert!(matches!(distribution_summary(&[], "m", "g"), Err(EvalError::EmptyGroup(_))));
    }

    #[test]
    fn mean_row() {
        let a: EvaluationReport = ConfusionMatrix { tp: 1, fp: 0, fn_: 0, tn: 1 }.into();
        let b: EvaluationReport = ConfusionMatrix { tp: 1, fp: 1, fn_: 0, tn: 0 }.into();
        assert_eq!(MeanRow::of(&[a, b]).accuracy, 0.75);
    }
}
