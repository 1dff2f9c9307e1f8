//! Hand-counted metric fixtures, checked against the implementation and
//! against the token-level oracle.

use std::fs;
use std::path::{Path, PathBuf};

use refscout_core::java::parse_compilation_unit;
use refscout_core::metrics::{compute_class_metrics, compute_method_metrics, CLASS_FEATURES, METHOD_FEATURES};
use refscout_testkit::expect::{parse_expectations, Section, Target};
use refscout_testkit::oracle::{class_oracle, method_oracle};

fn fixtures() -> Vec<(PathBuf, String, Vec<Section>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/metrics");
    let mut out = Vec::new();
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "java") {
            let source = fs::read_to_string(&path).unwrap();
            let expected = fs::read_to_string(path.with_extension("expected")).unwrap();
            out.push((path, source, parse_expectations(&expected).unwrap()));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    assert!(out.len() >= 30, "fixture corpus too small: {}", out.len());
    out
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

#[test]
fn implementation_matches_hand_counts() {
    let mut failures = Vec::new();
    for (path, source, sections) in fixtures() {
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let model = parse_compilation_unit(&source, &name).unwrap();
        let listed_methods: usize = model.classes.iter().map(|c| c.methods.len()).sum();
        let method_sections = sections.iter().filter(|s| matches!(s.target, Target::Method(..))).count();
        let class_sections = sections.len() - method_sections;
        if listed_methods != method_sections || model.classes.len() != class_sections {
            failures.push(format!("{name}: unit count mismatch"));
        }
        for section in &sections {
            let (labels, actual): (&[&str], Vec<f64>) = match &section.target {
                Target::Class(q) => {
                    let Some(class) = model.class(q) else {
                        failures.push(format!("{name}: missing class {q}"));
                        continue;
                    };
                    (&CLASS_FEATURES, compute_class_metrics(class).to_array().to_vec())
                }
                Target::Method(q, sig) => {
                    let Some(method) = model.class(q).and_then(|c| c.method(sig)) else {
                        failures.push(format!("{name}: missing method {q}#{sig}"));
                        continue;
                    };
                    (&METHOD_FEATURES, compute_method_metrics(method, model.class(q).unwrap()).to_array().to_vec())
                }
            };
            for key in section.values.keys() {
                if !labels.contains(&key.as_str()) {
                    failures.push(format!("{name} {:?}: unknown feature {key}", section.target));
                }
            }
            for (label, value) in labels.iter().zip(actual) {
                if !close(value, section.get(label)) {
                    failures.push(format!(
                        "{name} {:?}: {label} expected {} got {value}",
                        section.target,
                        section.get(label)
                    ));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn oracle_matches_hand_counts() {
    let mut failures = Vec::new();
    for (path, source, sections) in fixtures() {
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let single_type = sections.iter().filter(|s| matches!(s.target, Target::Class(_))).count() == 1;
        for section in &sections {
            let oracle = match &section.target {
                Target::Class(q) if single_type => class_oracle(&source, q.rsplit('.').next().unwrap()),
                Target::Class(_) => continue,
                Target::Method(_, sig) => method_oracle(&source, sig),
            };
            let Some(oracle) = oracle else {
                failures.push(format!("{name} {:?}: oracle could not locate", section.target));
                continue;
            };
            for (label, value) in oracle {
                if !close(value, section.get(label)) {
                    failures.push(format!(
                        "{name} {:?}: {label} expected {} oracle {value}",
                        section.target,
                        section.get(label)
                    ));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures.join("\n"));
}
