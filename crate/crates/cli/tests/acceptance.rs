//! Acceptance gate: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use refscout_core::bundle::{load_bundle, save_bundle, ModelBundle};
use refscout_core::dataset::{apply_scaler, fit_minmax, Dataset};
use refscout_core::evaluation::{evaluate, leave_one_project_out, permutation_importance, ConfusionMatrix};
use refscout_core::java::parse_compilation_unit;
use refscout_core::learners::bayes::GaussianNb;
use refscout_core::learners::logistic::loss_and_gradient;
use refscout_core::learners::{
    grid_search, predict, stratified_kfold, train, AlgorithmKind, AlgorithmSpec, HyperValue, Space,
};
use refscout_core::metrics::{
    compute_class_metrics, compute_method_metrics, feature_names, feature_vector, CLASS_FEATURES, FEATURE_COUNT,
    METHOD_FEATURES,
};
use refscout_core::miner::{advance_stability, MinedInstance, StabilityCounter};
use refscout_core::pipeline::loo_csv;
use refscout_testkit::cohesion::{cohesion_class, pair_cohesion};
use refscout_testkit::expect::{parse_expectations, Target};
use refscout_testkit::javagen::{planted_repo, separable_repo, stability_repo};
use refscout_testkit::synthetic::{label_copy, separable, xor};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn refscout(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_refscout"))
        .args(args)
        .env_remove("REFSCOUT_LOG")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("refscout {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn workdir() -> tempfile::TempDir {
    tempfile::tempdir().expect("temp dir")
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

fn criterion_1() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/metrics");
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "java"))
        .collect();
    files.sort();
    ensure(files.len() >= 30, || format!("only {} fixtures", files.len()))?;
    let mut checked = 0;
    for path in &files {
        let source = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let expected = fs::read_to_string(path.with_extension("expected")).map_err(|e| e.to_string())?;
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let model = parse_compilation_unit(&source, &name).map_err(|e| format!("{name}: {e}"))?;
        for section in parse_expectations(&expected)? {
            let (labels, actual): (&[&str], Vec<f64>) = match &section.target {
                Target::Class(q) => {
                    let c = model.class(q).ok_or(format!("{name}: no class {q}"))?;
                    (&CLASS_FEATURES, compute_class_metrics(c).to_array().to_vec())
                }
                Target::Method(q, sig) => {
                    let c = model.class(q).ok_or(format!("{name}: no class {q}"))?;
                    let m = c.method(sig).ok_or(format!("{name}: no method {q}#{sig}"))?;
                    (&METHOD_FEATURES, compute_method_metrics(m, c).to_array().to_vec())
                }
            };
            for (label, value) in labels.iter().zip(actual) {
                ensure(value == section.get(label), || {
                    format!("{name} {:?} {label}: expected {} got {value}", section.target, section.get(label))
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{} fixtures, {checked} values", files.len()))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..200 {
        let fields = rng.gen_range(1..=6);
        let methods = rng.gen_range(0..=8);
        let access: Vec<Vec<usize>> =
            (0..methods).map(|_| (0..fields).filter(|_| rng.gen_bool(0.35)).collect()).collect();
        let model = parse_compilation_unit(&cohesion_class(fields, &access), "Cohesive.java").map_err(|e| e.to_string())?;
        let m = compute_class_metrics(&model.classes[0]);
        let (tcc, lcc, _) = pair_cohesion(&access);
        ensure(m.tcc == tcc && m.lcc == lcc, || {
            format!("case {case}: ({}, {}) vs oracle ({tcc}, {lcc}) for {access:?}", m.tcc, m.lcc)
        })?;
    }
    Ok("200 classes".into())
}

fn criterion_3() -> Outcome {
    let planted = planted_repo();
    let dir = workdir();
    let out = dir.path().join("ds.csv");
    refscout(&["mine", p(planted.repo.path()), "--out", p(&out)])?;
    let ds = Dataset::read(&out).map_err(|e| e.to_string())?;
    let (pos, neg) = ds.class_counts();
    ensure(pos == 10 && neg == 0, || format!("{pos} positives, {neg} negatives"))?;
    let decoys = ds.instances.iter().filter(|i| !i.class.contains(".Ledger")).count();
    ensure(decoys == 0, || format!("{decoys} instances from decoy classes"))?;
    for (inst, x) in ds.instances.iter().zip(&planted.extractions) {
        ensure(inst.commit == x.parent_commit && inst.class == x.class && inst.method == x.method, || {
            format!("unexpected positive {}@{} {}", inst.class, inst.commit, inst.method)
        })?;
        let model = parse_compilation_unit(&x.parent_source, &x.path).map_err(|e| e.to_string())?;
        let class = model.class(&x.class).ok_or("parent class missing")?;
        let method = class.method(&x.method).ok_or("parent method missing")?;
        let direct = feature_vector(&compute_class_metrics(class), &compute_method_metrics(method, class));
        ensure(inst.features == direct, || format!("{} features differ from the parent-commit file", x.class))?;
    }
    Ok("10 positives at parent commits, 0 from 5 addition + 3 rename decoys".into())
}

fn set(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn criterion_4() -> Outcome {
    // Counter rules.
    let mut counter = StabilityCounter::default();
    counter.counts.insert("A".into(), 2);
    counter.counts.insert("B".into(), 2);
    counter.counts.insert("C".into(), 1);
    let (next, due) = advance_stability(&counter, &set(&["A", "B"]), &set(&["B"]), 3);
    ensure(due == set(&["A"]), || format!("due {due:?}"))?;
    ensure(next.get("A") == 0 && next.get("B") == 0 && next.get("C") == 1, || format!("{next:?}"))?;

    let s = stability_repo(7);
    let dir = workdir();
    let out = dir.path().join("ds.csv");
    refscout(&["mine", p(s.repo.path()), "--out", p(&out), "--s", "3"])?;
    let ds = Dataset::read(&out).map_err(|e| e.to_string())?;
    let commits: Vec<&str> = ds.instances.iter().map(|i| i.commit.as_str()).collect();
    let expected: Vec<&str> = [&s.edits[2], &s.edits[5]].iter().flat_map(|c| [c.as_str(); 3]).collect();
    ensure(commits == expected, || format!("negatives at {commits:?}"))?;
    ensure(ds.instances.iter().all(|i| !i.label), || "unexpected positive".into())?;
    let methods: Vec<&str> = ds.instances[..3].iter().map(|i| i.method.as_str()).collect();
    ensure(methods == s.methods, || format!("methods {methods:?}"))?;
    ensure(ds.metadata.contains(&("s-threshold".into(), "3".into())), || "s not echoed".into())?;

    let out20 = dir.path().join("ds20.csv");
    refscout(&["mine", p(s.repo.path()), "--out", p(&out20)])?;
    let ds20 = Dataset::read(&out20).map_err(|e| e.to_string())?;
    ensure(ds20.metadata.contains(&("s-threshold".into(), "20".into())), || "default s not echoed".into())?;
    ensure(ds20.is_empty(), || "7 edits must not reach s = 20".into())?;
    Ok("windows at edits 3 and 6; default s = 20 echoed".into())
}

fn criterion_5() -> Outcome {
    let train_set = separable(500, 10, 1);
    let test_set = separable(500, 10, 2);
    let scaler = fit_minmax(&train_set.x);
    let (tx, vx) = (apply_scaler(&scaler, &train_set.x), apply_scaler(&scaler, &test_set.x));
    let mut f1s = Vec::new();
    for kind in AlgorithmKind::ALL {
        let model = train(&AlgorithmSpec::default_for(kind), &tx, &train_set.y, 42).map_err(|e| e.to_string())?;
        let f1 = evaluate(&model, &vx, &test_set.y).map_err(|e| e.to_string())?.f1;
        ensure(f1 >= 0.95, || format!("{kind} F1 {f1}"))?;
        f1s.push(format!("{kind} {f1:.3}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rf = AlgorithmSpec::new(
        AlgorithmKind::Rf,
        [
            ("ntrees".to_string(), HyperValue::Int(1)),
            ("bootstrap".to_string(), HyperValue::Bool(false)),
            ("max_features".to_string(), HyperValue::Text("all".into())),
        ]
        .into_iter()
        .collect(),
    )
    .map_err(|e| e.to_string())?;
    let dt = AlgorithmSpec::default_for(AlgorithmKind::Dt);
    let mut datasets = 0;
    while datasets < 200 {
        let n = rng.gen_range(4..60);
        let d = rng.gen_range(1..6);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| f64::from(rng.gen_range(0u8..5))).collect()).collect();
        let y: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
            continue;
        }
        let seed = rng.gen();
        let (f, t) = (train(&rf, &x, &y, seed).unwrap(), train(&dt, &x, &y, seed).unwrap());
        for row in &x {
            ensure(predict(&f, row).unwrap().0 == predict(&t, row).unwrap().0, || "RF(1) and DT disagree".into())?;
        }
        datasets += 1;
    }

    for point in 0..20 {
        let n = 30;
        let d = 4;
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
        let y: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
        let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let b = rng.gen_range(-1.0..1.0);
        let lambda = rng.gen_range(0.0..0.5);
        let (_, gw, gb) = loss_and_gradient(&w, b, &x, &y, lambda);
        let h = 1e-5;
        let numeric = |j: Option<usize>| {
            let (mut up, mut down, mut bu, mut bd) = (w.clone(), w.clone(), b, b);
            match j {
                Some(j) => {
                    up[j] += h;
                    down[j] -= h;
                }
                None => {
                    bu += h;
                    bd -= h;
                }
            }
            (loss_and_gradient(&up, bu, &x, &y, lambda).0 - loss_and_gradient(&down, bd, &x, &y, lambda).0) / (2.0 * h)
        };
        let pairs = (0..d).map(|j| (gw[j], numeric(Some(j)))).chain(std::iter::once((gb, numeric(None))));
        for (a, num) in pairs {
            let rel = (a - num).abs() / a.abs().max(num.abs()).max(f64::MIN_POSITIVE);
            ensure(rel <= 1e-5, || format!("point {point}: analytic {a} numeric {num}"))?;
        }
    }

    let nb = GaussianNb::fit(&tx, &train_set.y, 1e-9);
    for _ in 0..1000 {
        let probe: Vec<f64> = (0..10).map(|_| rng.gen_range(-3.0..4.0)).collect();
        let post = nb.posteriors(&probe);
        ensure((post[0] + post[1] - 1.0).abs() <= 1e-9, || format!("posteriors {post:?}"))?;
    }
    Ok(format!("{}; RF(1)≡DT on 200; gradient at 20 points; NB sums", f1s.join(", ")))
}

fn instance(project: &str, i: usize, label: bool, features: Vec<f64>) -> MinedInstance {
    MinedInstance { project: project.into(), commit: format!("c{i}"), class: "p.C".into(), method: format!("m{i}()"), label, features }
}

fn separable_dataset(project: &str, n: usize, seed: u64) -> Dataset {
    let s = separable(n, FEATURE_COUNT, seed);
    Dataset::new(s.x.into_iter().zip(s.y).enumerate().map(|(i, (x, y))| instance(project, i, y, x)).collect())
}

fn criterion_6() -> Outcome {
    let data = xor(200, 5);
    let space = Space { axes: vec![("max_depth".into(), vec![HyperValue::Int(1), HyperValue::Int(3)])] };
    let a = grid_search(AlgorithmKind::Dt, &space, &data.x, &data.y, 10, 42).map_err(|e| e.to_string())?;
    ensure(a.best_params()["max_depth"] == HyperValue::Int(3), || format!("picked {:?}", a.best_params()))?;
    let b = grid_search(AlgorithmKind::Dt, &space, &data.x, &data.y, 10, 42).map_err(|e| e.to_string())?;
    ensure(a == b, || "grid search not deterministic".into())?;
    let tie = Space { axes: vec![("max_depth".into(), vec![HyperValue::Int(12), HyperValue::Unbounded])] };
    let sep = separable(100, 3, 9);
    let t = grid_search(AlgorithmKind::Dt, &tie, &sep.x, &sep.y, 10, 1).map_err(|e| e.to_string())?;
    ensure(t.scores[0].1 == t.scores[1].1 && t.best_index == 0, || "tie not resolved to first combination".into())?;

    for (pos, neg) in [(10, 10), (20, 10), (37, 23), (101, 55)] {
        let labels: Vec<bool> = (0..pos + neg).map(|i| i < pos).collect();
        let folds = stratified_kfold(&labels, 10, 42).map_err(|e| e.to_string())?;
        for class in [true, false] {
            let counts: Vec<usize> = folds.iter().map(|f| f.iter().filter(|&&i| labels[i] == class).count()).collect();
            ensure(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1, || format!("{counts:?}"))?;
        }
    }

    let ds = separable_dataset("a", 60, 1).merged(&separable_dataset("b", 60, 2)).merged(&separable_dataset("c", 60, 3));
    let mut mutated = ds.clone();
    for i in mutated.instances.iter_mut().filter(|i| i.project == "b") {
        for v in &mut i.features {
            *v = *v * 1000.0 + 7.0;
        }
    }
    let lr = Space::single(Default::default());
    let base = leave_one_project_out(&ds, AlgorithmKind::Lr, &lr, 10, 9).map_err(|e| e.to_string())?;
    let other = leave_one_project_out(&mutated, AlgorithmKind::Lr, &lr, 10, 9).map_err(|e| e.to_string())?;
    let (x, y) = (&base.projects[1].result, &other.projects[1].result);
    ensure(x.model == y.model && x.scaler == y.scaler, || "held-out project leaked into scaler or model".into())?;
    Ok("XOR picks depth 3; ties to first; folds balanced; no leakage".into())
}

fn criterion_7() -> Outcome {
    let s = label_copy(300, 12, 11);
    let names: Vec<String> = (0..12).map(|j| format!("f{j}")).collect();
    let model = train(&AlgorithmSpec::default_for(AlgorithmKind::Rf), &s.x, &s.y, 1).map_err(|e| e.to_string())?;
    let report = permutation_importance(&model, &s.x, &s.y, &names, 50, 42).map_err(|e| e.to_string())?;
    ensure(report.baseline_f1 == 1.0, || format!("baseline F1 {}", report.baseline_f1))?;
    let constant = report.features.iter().find(|f| f.index == 11).ok_or("constant feature missing")?;
    ensure(constant.mean_drop == 0.0, || format!("constant feature drop {}", constant.mean_drop))?;
    ensure(report.features[0].index == 0 && report.features[0].mean_drop > report.features[1].mean_drop, || {
        format!("top feature {}", report.features[0].name)
    })?;
    Ok(format!("label copy drop {:.3}, constant 0", report.features[0].mean_drop))
}

fn criterion_8() -> Outcome {
    let repo = separable_repo(30, 8, 6);
    let mut outputs = Vec::new();
    let mut best_f1 = 0.0;
    for run in 0..2 {
        let dir = workdir();
        let w = dir.path();
        let map = w.join("projects.csv");
        fs::write(&map, format!("{},fixture\n", repo.path().display())).map_err(|e| e.to_string())?;
        let path = |n: &str| w.join(n);
        refscout(&["--seed", "42", "mine", p(repo.path()), "--s", "3", "--project-map", p(&map), "--out", p(&path("ds.csv"))])?;
        refscout(&[
            "--seed", "42", "--reproducible", "train", "--dataset", p(&path("ds.csv")), "--algo", "all",
            "--out", p(&path("model.bundle")), "--report", p(&path("train.csv")), "--holdout", p(&path("held.csv")),
        ])?;
        refscout(&["--seed", "42", "evaluate", "--model", p(&path("model.bundle")), "--dataset", p(&path("held.csv")), "--out", p(&path("eval.csv"))])?;
        refscout(&["--seed", "42", "importance", "--model", p(&path("model.bundle")), "--dataset", p(&path("held.csv")), "--out", p(&path("imp.csv"))])?;
        let files: Vec<Vec<u8>> = ["ds.csv", "train.csv", "held.csv", "model.bundle", "eval.csv", "imp.csv"]
            .iter()
            .map(|n| fs::read(path(n)).unwrap_or_default())
            .collect();
        if run == 0 {
            let eval = String::from_utf8_lossy(&files[4]).into_owned();
            let row: Vec<&str> = eval.lines().nth(1).ok_or("empty evaluation report")?.split(',').collect();
            best_f1 = row[4].parse::<f64>().map_err(|e| e.to_string())?;
        }
        outputs.push(files);
    }
    ensure(outputs[0] == outputs[1], || "outputs differ between runs".into())?;
    ensure(best_f1 >= 0.9, || format!("held-out F1 {best_f1}"))?;
    Ok(format!("6 files byte-identical; held-out F1 {best_f1:.3}"))
}

fn criterion_9() -> Outcome {
    let ds = separable_dataset("a", 120, 4);
    let scaler = fit_minmax(&ds.features());
    let x = apply_scaler(&scaler, &ds.features());
    let probes = separable(100, FEATURE_COUNT, 77).x;
    let dir = workdir();
    for kind in AlgorithmKind::ALL {
        let model = train(&AlgorithmSpec::default_for(kind), &x, &ds.labels(), 3).map_err(|e| e.to_string())?;
        let bundle = ModelBundle::new(model, scaler.clone(), feature_names(), ds.content_hash());
        let path = dir.path().join(format!("{kind}.bundle"));
        save_bundle(&bundle, &path).map_err(|e| e.to_string())?;
        let loaded = load_bundle(&path).map_err(|e| e.to_string())?;
        for probe in &probes {
            let (a, b) = (bundle.predict(probe).unwrap(), loaded.predict(probe).unwrap());
            ensure(a.0 == b.0 && (a.1 - b.1).abs() <= 1e-12, || format!("{kind}: {a:?} vs {b:?}"))?;
        }
        ensure(loaded.model.spec == bundle.model.spec, || format!("{kind}: spec changed"))?;
    }
    Ok("5 kinds, 100 probes each".into())
}

fn criterion_10() -> Outcome {
    let c = ConfusionMatrix { tp: 9, fp: 1, fn_: 3, tn: 7 };
    let checks = [(c.accuracy(), 0.8, "accuracy"), (c.precision(), 0.9, "precision"), (c.recall(), 0.75, "recall"), (c.f1(), 0.8182, "f1")];
    for (got, want, name) in checks {
        ensure((got - want).abs() <= 1e-4, || format!("{name} {got}"))?;
    }
    let ds = separable_dataset("a", 40, 1).merged(&separable_dataset("b", 40, 2)).merged(&separable_dataset("c", 40, 3));
    let report = leave_one_project_out(&ds, AlgorithmKind::Dt, &Space::single(Default::default()), 10, 1).map_err(|e| e.to_string())?;
    let csv = loo_csv(&report);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    ensure(rows.len() == 4 && rows[3].starts_with("mean,"), || format!("rows {rows:?}"))?;
    let mean_f1 = report.projects.iter().map(|p| p.result.report.f1).sum::<f64>() / 3.0;
    ensure((report.mean.f1 - mean_f1).abs() < 1e-12, || "mean row is not the arithmetic mean".into())?;
    Ok("9/1/3/7 metrics; 3 project rows + mean".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("metrics oracle suite", criterion_1, Some(Duration::from_secs(5))),
        ("cohesion brute-force equivalence", criterion_2, None),
        ("detector ground truth", criterion_3, None),
        ("stability heuristic", criterion_4, None),
        ("learner sanity", criterion_5, Some(Duration::from_secs(60))),
        ("pipeline fidelity", criterion_6, None),
        ("permutation importance", criterion_7, None),
        ("end-to-end determinism", criterion_8, Some(Duration::from_secs(180))),
        ("bundle round trip", criterion_9, None),
        ("evaluation arithmetic", criterion_10, None),
    ];
    let mut failed = 0;
    for (n, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&result, budget) {
            if elapsed > limit {
                result = Err(format!("took {elapsed:.1?}, limit {limit:?}"));
            }
        }
        match result {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}; {elapsed:.2?})", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why}; {elapsed:.2?})", n + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
