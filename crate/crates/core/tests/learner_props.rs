use std::collections::BTreeMap;

use proptest::prelude::*;
use refscout_core::dataset::{apply_scaler, fit_minmax};
use refscout_core::evaluation::evaluate;
use refscout_core::learners::bayes::GaussianNb;
use refscout_core::learners::logistic::loss_and_gradient;
use refscout_core::learners::svm::{descend, objective};
use refscout_core::learners::tree::{gini, DecisionTree, Node, TreeParams};
use refscout_core::learners::{
    grid_search, predict, stratified_kfold, train, AlgorithmKind, AlgorithmSpec, HyperValue, Hyperparameters, Model,
    Space,
};
use refscout_testkit::synthetic::{separable, xor};

fn params(pairs: &[(&str, HyperValue)]) -> Hyperparameters {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>()
}

fn dataset() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<bool>)> {
    (2usize..40, 1usize..5).prop_flat_map(|(n, d)| {
        (
            prop::collection::vec(prop::collection::vec(prop_oneof![0.0..1.0f64, (0u8..4).prop_map(f64::from)], d), n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_filter("both classes", |(_, y)| y.iter().any(|&l| l) && y.iter().any(|&l| !l))
    })
}

#[test]
fn every_learner_separates_the_synthetic_set() {
    let train_set = separable(500, 10, 1);
    let test_set = separable(500, 10, 2);
    let scaler = fit_minmax(&train_set.x);
    let tx = apply_scaler(&scaler, &train_set.x);
    let vx = apply_scaler(&scaler, &test_set.x);
    for kind in AlgorithmKind::ALL {
        let model = train(&AlgorithmSpec::default_for(kind), &tx, &train_set.y, 42).unwrap();
        let report = evaluate(&model, &vx, &test_set.y).unwrap();
        assert!(report.f1 >= 0.95, "{kind}: F1 {}", report.f1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn single_tree_forest_equals_tree((x, y) in dataset(), seed in any::<u64>(), probes in prop::collection::vec(0.0..4.0f64, 8)) {
        let rf = AlgorithmSpec::new(AlgorithmKind::Rf, params(&[
            ("ntrees", HyperValue::Int(1)),
            ("bootstrap", HyperValue::Bool(false)),
            ("max_features", HyperValue::Text("all".into())),
        ])).unwrap();
        let dt = AlgorithmSpec::default_for(AlgorithmKind::Dt);
        let forest = train(&rf, &x, &y, seed).unwrap();
        let tree = train(&dt, &x, &y, seed).unwrap();
        let d = x[0].len();
        let probe_rows = probes.chunks(d).filter(|c| c.len() == d).map(<[f64]>::to_vec);
        for row in x.iter().cloned().chain(probe_rows) {
            prop_assert_eq!(predict(&forest, &row).unwrap().0, predict(&tree, &row).unwrap().0);
        }
        if let (Model::Forest(f), Model::Tree(t)) = (&forest.model, &tree.model) {
            prop_assert_eq!(&f.trees[0], t);
        } else {
            prop_assert!(false, "unexpected model kinds");
        }
    }

    #[test]
    fn split_never_increases_impurity((x, y) in dataset(), leaf in 1usize..4) {
        let params = TreeParams::from_spec(&AlgorithmSpec::new(AlgorithmKind::Dt, params(&[("min_samples_leaf", HyperValue::Int(leaf as u64))])).unwrap());
        let tree = DecisionTree::fit(&x, &y, &params, 0);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); tree.nodes.len()];
        members[0] = (0..x.len()).collect();
        for id in 0..tree.nodes.len() {
            if let Node::Split { feature, threshold, left, right } = tree.nodes[id] {
                let here = std::mem::take(&mut members[id]);
                let (l, r): (Vec<usize>, Vec<usize>) = here.iter().partition(|&&i| x[i][feature] <= threshold);
                prop_assert!(!l.is_empty() && !r.is_empty());
                prop_assert!(l.len() >= leaf && r.len() >= leaf);
                let g = |s: &[usize]| gini(s.iter().filter(|&&i| y[i]).count() as f64, s.len() as f64);
                let n = here.len() as f64;
                let weighted = (l.len() as f64 * g(&l) + r.len() as f64 * g(&r)) / n;
                prop_assert!(weighted <= g(&here) + 1e-12);
                members[left] = l;
                members[right] = r;
            }
        }
    }

    #[test]
    fn logistic_gradient_matches_central_differences(
        (x, y) in dataset(),
        w0 in prop::collection::vec(-2.0..2.0f64, 4),
        b in -2.0..2.0f64,
        lambda in 0.0..1.0f64,
    ) {
        let d = x[0].len();
        let w: Vec<f64> = w0[..d.min(4)].iter().copied().chain(std::iter::repeat(0.3)).take(d).collect();
        let (_, gw, gb) = loss_and_gradient(&w, b, &x, &y, lambda);
        let h = 1e-5;
        let close = |analytic: f64, numeric: f64| {
            let scale = analytic.abs().max(numeric.abs());
            scale < 1e-9 || (analytic - numeric).abs() / scale <= 1e-5
        };
        for j in 0..d {
            let mut up = w.clone();
            let mut down = w.clone();
            up[j] += h;
            down[j] -= h;
            let numeric = (loss_and_gradient(&up, b, &x, &y, lambda).0 - loss_and_gradient(&down, b, &x, &y, lambda).0) / (2.0 * h);
            prop_assert!(close(gw[j], numeric), "w[{}]: {} vs {}", j, gw[j], numeric);
        }
        let numeric = (loss_and_gradient(&w, b + h, &x, &y, lambda).0 - loss_and_gradient(&w, b - h, &x, &y, lambda).0) / (2.0 * h);
        prop_assert!(close(gb, numeric), "b: {} vs {}", gb, numeric);
    }

    #[test]
    fn bayes_posteriors_sum_to_one((x, y) in dataset(), probe in prop::collection::vec(-10.0..10.0f64, 4)) {
        let nb = GaussianNb::fit(&x, &y, 1e-9);
        let d = x[0].len();
        for row in x.iter().cloned().chain(std::iter::once(probe[..d].to_vec())) {
            let p = nb.posteriors(&row);
            prop_assert!((p[0] + p[1] - 1.0).abs() <= 1e-9);
            prop_assert!((0.0..=1.0).contains(&p[1]));
        }
    }

    #[test]
    fn kfold_is_a_balanced_partition(pos in 10usize..40, neg in 10usize..40, k in 2usize..11, seed in any::<u64>()) {
        let labels: Vec<bool> = (0..pos + neg).map(|i| i < pos).collect();
        let folds = stratified_kfold(&labels, k, seed).unwrap();
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..pos + neg).collect::<Vec<_>>());
        for class in [true, false] {
            let counts: Vec<usize> = folds.iter().map(|f| f.iter().filter(|&&i| labels[i] == class).count()).collect();
            prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        }
        prop_assert_eq!(folds, stratified_kfold(&labels, k, seed).unwrap());
    }
}

/// Objective at the epoch-averaged parameters `(w_1 + … + w_t) / t`.
#[test]
fn svm_epoch_averaged_objective_does_not_increase() {
    let data = separable(500, 10, 3);
    let x = apply_scaler(&fit_minmax(&data.x), &data.x);
    for lambda in [0.0001, 0.001, 0.01] {
        let d = x[0].len();
        let (mut w_sum, mut b_sum) = (vec![0.0; d], 0.0);
        let mut history = Vec::new();
        descend(&x, &data.y, lambda, 50, |w, b| {
            for (s, v) in w_sum.iter_mut().zip(w) {
                *s += v;
            }
            b_sum += b;
            let t = (history.len() + 1) as f64;
            let w_avg: Vec<f64> = w_sum.iter().map(|s| s / t).collect();
            history.push(objective(&w_avg, b_sum / t, &x, &data.y, lambda));
        });
        for t in 1..history.len() {
            assert!(history[t] <= history[t - 1] + 1e-8, "λ={lambda} epoch {}: {} > {}", t + 1, history[t], history[t - 1]);
        }
    }
}

#[test]
fn grid_search_prefers_depth_three_on_xor() {
    let data = xor(200, 5);
    let space = Space { axes: vec![("max_depth".into(), vec![HyperValue::Int(1), HyperValue::Int(3)])] };
    let result = grid_search(AlgorithmKind::Dt, &space, &data.x, &data.y, 10, 42).unwrap();
    assert_eq!(result.best_params()["max_depth"], HyperValue::Int(3));
    assert!(result.scores[0].1 < result.scores[1].1);
    assert_eq!(result, grid_search(AlgorithmKind::Dt, &space, &data.x, &data.y, 10, 42).unwrap());
}

#[test]
fn grid_search_ties_go_to_the_first_combination() {
    let data = separable(100, 3, 9);
    let space = Space { axes: vec![("max_depth".into(), vec![HyperValue::Int(6), HyperValue::Int(12)])] };
    let result = grid_search(AlgorithmKind::Dt, &space, &data.x, &data.y, 10, 1).unwrap();
    assert_eq!(result.scores[0].1, result.scores[1].1);
    assert_eq!(result.best_index, 0);
}

#[test]
fn single_combination_space() {
    let data = separable(60, 3, 4);
    let only = params(&[("lambda", HyperValue::Real(0.1))]);
    let result = grid_search(AlgorithmKind::Lr, &Space::single(only.clone()), &data.x, &data.y, 10, 7).unwrap();
    assert_eq!(result.scores.len(), 1);
    assert_eq!(result.best_params(), &only);
    assert_eq!(result.best_spec().params, AlgorithmSpec::new(AlgorithmKind::Lr, only).unwrap().params);
}
