//! Stratified k-fold cross-validation and grid search.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::{predict, train, AlgorithmKind, AlgorithmSpec, Hyperparameters, LearnError, Space, TrainedModel};
use crate::evaluation::ConfusionMatrix;
use crate::rng;

/// Splits row indices into `k` folds. Each class is shuffled and dealt
/// round-robin, negatives continuing where positives stopped, so per-class
/// counts differ by at most one between folds. Fold members are ascending.
pub fn stratified_kfold(labels: &[bool], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, LearnError> {
    assert!(k >= 2, "k-fold needs at least two folds");
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for (stream, label, name) in [(0u64, true, "positive"), (1, false, "negative")] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        if members.len() < k {
            return Err(LearnError::TooFewInstances { class: name, have: members.len(), need: k });
        }
        members.shuffle(&mut rng::stream(seed, stream));
        for i in members {
            folds[next % k].push(i);
            next += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub kind: AlgorithmKind,
    /// Every combination in enumeration order with its mean validation F1.
    pub scores: Vec<(Hyperparameters, f64)>,
    pub best_index: usize,
}

impl GridSearchResult {
    pub fn best_params(&self) -> &Hyperparameters {
        &self.scores[self.best_index].0
    }

    pub fn best_score(&self) -> f64 {
        self.scores[self.best_index].1
    }

    pub fn best_spec(&self) -> AlgorithmSpec {
        AlgorithmSpec::new(self.kind, self.best_params().clone()).expect("searched combinations are valid")
    }
}

fn fold_f1(spec: &AlgorithmSpec, x: &[Vec<f64>], y: &[bool], folds: &[Vec<usize>], f: usize, seed: u64) -> f64 {
    let held: &[usize] = &folds[f];
    let mut tx = Vec::new();
    let mut ty = Vec::new();
    for (g, fold) in folds.iter().enumerate() {
        if g != f {
            for &i in fold {
                tx.push(x[i].clone());
                ty.push(y[i]);
            }
        }
    }
    let model = match train(spec, &tx, &ty, rng::derive_seed(seed, f as u64)) {
        Ok(m) => m,
        Err(e) => {
            log::warn!("{} {:?} fold {f}: {e}; scored 0", spec.kind, spec.params);
            return 0.0;
        }
    };
    let mut cm = ConfusionMatrix::default();
    for &i in held {
        let (label, _) = predict(&model, &x[i]).expect("dimension checked at train");
        cm.record(label, y[i]);
    }
    cm.f1()
}

/// Mean k-fold F1 of every combination in `space`. The best combination has
/// the highest mean; ties go to the earliest in enumeration order.
pub fn grid_search(
    kind: AlgorithmKind,
    space: &Space,
    x: &[Vec<f64>],
    y: &[bool],
    k: usize,
    seed: u64,
) -> Result<GridSearchResult, LearnError> {
    let combos = space.combinations();
    if combos.is_empty() {
        return Err(LearnError::EmptySpace);
    }
    let specs = combos.iter().map(|c| AlgorithmSpec::new(kind, c.clone())).collect::<Result<Vec<_>, _>>()?;
    let folds = stratified_kfold(y, k, seed)?;
    let tasks: Vec<(usize, usize)> = (0..specs.len()).flat_map(|c| (0..k).map(move |f| (c, f))).collect();
    let f1s: Vec<f64> = tasks.par_iter().map(|&(c, f)| fold_f1(&specs[c], x, y, &folds, f, seed)).collect();

    let mut scores = Vec::with_capacity(combos.len());
    let mut best_index = 0;
    for (c, combo) in combos.into_iter().enumerate() {
        let mean = f1s[c * k..(c + 1) * k].iter().sum::<f64>() / k as f64;
        if mean > scores.get(best_index).map_or(f64::NEG_INFINITY, |s: &(Hyperparameters, f64)| s.1) {
            best_index = c;
        }
        scores.push((combo, mean));
    }
    log::debug!("{kind}: best mean F1 {:.4} at combination {best_index}", scores[best_index].1);
    Ok(GridSearchResult { kind, scores, best_index })
}

/// Refit on all available data; the model is tagged `production`.
pub fn train_production(
    kind: AlgorithmKind,
    best_params: &Hyperparameters,
    x: &[Vec<f64>],
    y: &[bool],
    seed: u64,
) -> Result<TrainedModel, LearnError> {
    let spec = AlgorithmSpec::new(kind, best_params.clone())?;
    let mut model = train(&spec, x, y, seed)?;
    model.tag = "production".into();
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_by_divisibility() {
        let labels: Vec<bool> = (0..20).map(|i| i < 10).collect();
        let folds = stratified_kfold(&labels, 10, 3).unwrap();
        for f in &folds {
            assert_eq!(f.iter().filter(|&&i| labels[i]).count(), 1);
            assert_eq!(f.len(), 2);
        }
        let labels: Vec<bool> = (0..30).map(|i| i < 20).collect();
        for f in stratified_kfold(&labels, 10, 3).unwrap() {
            assert_eq!(f.iter().filter(|&&i| labels[i]).count(), 2);
            assert_eq!(f.len(), 3);
        }
    }

    #[test]
    fn too_few_instances() {
        let labels: Vec<bool> = (0..20).map(|i| i < 9).collect();
        assert!(matches!(stratified_kfold(&labels, 10, 1), Err(LearnError::TooFewInstances { have: 9, .. })));
    }
}
