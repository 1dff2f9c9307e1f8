//! End-to-end training run and per-file prediction.
//!
//! A training run deduplicates the dataset, splits it 80/20 by class, fits
//! the scaler on the training part, grid-searches each requested algorithm
//! with stratified k-fold CV, scores the tuned models on the held-out part
//! and refits the best one on all data as the production model.

use std::fmt::Write as _;

use crate::bundle::ModelBundle;
use crate::dataset::{apply_scaler, deduplicate, fit_minmax, stratified_split, Dataset, DatasetError};
use crate::evaluation::{
    evaluate, permutation_importance, DistributionSummary, EvalError, EvaluationReport, ImportanceReport, LooReport,
};
use crate::java::{parse_compilation_unit, ParseError};
use crate::learners::{grid_search, train, train_production, AlgorithmKind, GridSearchResult, LearnError, Space};
use crate::metrics::unit_features;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("no algorithms requested")]
    NoAlgorithms,
}

#[derive(Debug, Clone)]
pub struct TrainingOptions {
    pub algorithms: Vec<AlgorithmKind>,
    pub test_fraction: f64,
    pub folds: usize,
    pub seed: u64,
    /// Search space per algorithm; the default grid when absent.
    pub spaces: Vec<(AlgorithmKind, Space)>,
}

impl TrainingOptions {
    pub fn new(algorithms: Vec<AlgorithmKind>, seed: u64) -> Self {
        TrainingOptions { algorithms, test_fraction: 0.2, folds: 10, seed, spaces: Vec::new() }
    }

    pub fn space(&self, kind: AlgorithmKind) -> Space {
        self.spaces.iter().find(|(k, _)| *k == kind).map_or_else(|| kind.default_space(), |(_, s)| s.clone())
    }
}

#[derive(Debug, Clone)]
pub struct AlgorithmOutcome {
    pub kind: AlgorithmKind,
    pub search: GridSearchResult,
    pub test: EvaluationReport,
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub train_size: usize,
    pub test_size: usize,
    pub algorithms: Vec<AlgorithmOutcome>,
    pub best: AlgorithmKind,
    pub bundle: ModelBundle,
    /// Held-out part, unscaled, for later evaluation or importance runs.
    pub test_set: Dataset,
}

pub fn run_training(dataset: &Dataset, options: &TrainingOptions) -> Result<TrainingOutcome, PipelineError> {
    if options.algorithms.is_empty() {
        return Err(PipelineError::NoAlgorithms);
    }
    let data = deduplicate(dataset);
    let (train_set, test_set) = stratified_split(&data, options.test_fraction, options.seed)?;
    log::info!("split: {} train, {} test", train_set.len(), test_set.len());

    let scaler = fit_minmax(&train_set.features());
    let tx = apply_scaler(&scaler, &train_set.features());
    let ty = train_set.labels();
    let vx = apply_scaler(&scaler, &test_set.features());
    let vy = test_set.labels();

    let mut outcomes = Vec::new();
    for &kind in &options.algorithms {
        let search = grid_search(kind, &options.space(kind), &tx, &ty, options.folds, options.seed)?;
        let model = train(&search.best_spec(), &tx, &ty, options.seed)?;
        let test = evaluate(&model, &vx, &vy)?;
        log::info!("{kind}: cv F1 {:.4}, test F1 {:.4}", search.best_score(), test.f1);
        outcomes.push(AlgorithmOutcome { kind, search, test });
    }
    // Highest held-out F1; earlier algorithms win ties.
    let best = outcomes
        .iter()
        .fold(None::<&AlgorithmOutcome>, |acc, o| match acc {
            Some(a) if a.test.f1 >= o.test.f1 => Some(a),
            _ => Some(o),
        })
        .expect("at least one algorithm");

    let all_scaler = fit_minmax(&data.features());
    let ax = apply_scaler(&all_scaler, &data.features());
    let model = train_production(best.kind, best.search.best_params(), &ax, &data.labels(), options.seed)?;
    let bundle = ModelBundle::new(model, all_scaler, data.feature_names.clone(), data.content_hash());

    Ok(TrainingOutcome {
        train_size: train_set.len(),
        test_size: test_set.len(),
        best: best.kind,
        algorithms: outcomes,
        bundle,
        test_set,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodPrediction {
    pub class: String,
    pub method: String,
    pub recommend: bool,
    pub score: f64,
}

/// Scores every method of a Java source file with a bundle.
pub fn predict_source(bundle: &ModelBundle, source: &str, path: &str) -> Result<Vec<MethodPrediction>, PipelineError> {
    let model = parse_compilation_unit(source, path)?;
    unit_features(&model)
        .into_iter()
        .map(|(class, method, features)| {
            let (recommend, score) = bundle.predict(&features)?;
            Ok(MethodPrediction { class, method, recommend, score })
        })
        .collect()
}

/// Scores a raw (unscaled) dataset with a bundle.
pub fn evaluate_bundle(bundle: &ModelBundle, dataset: &Dataset) -> Result<EvaluationReport, PipelineError> {
    let x = apply_scaler(&bundle.scaler, &dataset.features());
    Ok(evaluate(&bundle.model, &x, &dataset.labels())?)
}

pub fn bundle_importance(
    bundle: &ModelBundle,
    dataset: &Dataset,
    repeats: usize,
    seed: u64,
) -> Result<ImportanceReport, PipelineError> {
    let x = apply_scaler(&bundle.scaler, &dataset.features());
    Ok(permutation_importance(&bundle.model, &x, &dataset.labels(), &bundle.feature_names, repeats, seed)?)
}

fn report_line(out: &mut String, label: &str, r: &EvaluationReport) {
    let c = &r.confusion;
    let _ = writeln!(
        out,
        "{label},{},{},{},{},{},{},{},{}",
        r.accuracy, r.precision, r.recall, r.f1, c.tp, c.fp, c.fn_, c.tn
    );
}

pub const REPORT_HEADER: &str = "name,accuracy,precision,recall,f1,tp,fp,fn,tn";

/// One row per algorithm with its held-out scores.
pub fn training_report_csv(outcome: &TrainingOutcome) -> String {
    let mut out = String::from("algorithm,cv_f1,best_params,accuracy,precision,recall,f1,tp,fp,fn,tn\n");
    for a in &outcome.algorithms {
        let params: Vec<String> = a.search.best_params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut row = String::new();
        report_line(&mut row, &format!("{},{},{}", a.kind, a.search.best_score(), params.join(";")), &a.test);
        out.push_str(&row);
    }
    out
}

pub fn evaluation_csv(label: &str, report: &EvaluationReport) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    report_line(&mut out, label, report);
    out
}

/// One row per held-out project, then a `mean` row.
pub fn loo_csv(report: &LooReport) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for p in &report.projects {
        report_line(&mut out, &p.project, &p.result.report);
    }
    let m = &report.mean;
    let _ = writeln!(out, "mean,{},{},{},{},,,,", m.accuracy, m.precision, m.recall, m.f1);
    out
}

pub fn importance_csv(report: &ImportanceReport) -> String {
    let mut out = String::from("rank,feature,mean_drop,std_drop\n");
    for (rank, f) in report.features.iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", rank + 1, f.name, f.mean_drop, f.std_drop);
    }
    out
}

pub fn distributions_csv(summaries: &[DistributionSummary]) -> String {
    let mut out = String::from("metric,group,n,median,q1,q3\n");
    for d in summaries {
        let _ = writeln!(out, "{},{},{},{},{},{}", d.metric, d.group, d.n, d.median, d.q1, d.q3);
    }
    out
}
