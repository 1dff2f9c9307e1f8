//! Extract Method detection between two versions of one file.
//!
//! A method `n` of the after version is reported as extracted from `p` when
//! `n` is new, `p` exists in both versions, `p` now calls `n`, and at least
//! half of `n`'s canonical statements were moved out of `p`.

use std::collections::BTreeSet;

use crate::java::{canonicalize_statement, ClassModel, CodeModel, MethodModel};

/// Minimum share of the extracted body that must have moved out of the parent.
pub const OVERLAP_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MethodRef {
    pub class: String,
    pub signature: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractMethodInstance {
    pub parent_method: MethodRef,
    pub extracted_method: MethodRef,
    pub overlap_ratio: f64,
    pub commit: String,
}

/// Distinct canonical statements of a method body.
pub fn statement_set(method: &MethodModel) -> BTreeSet<String> {
    method.body.tree.iter().map(canonicalize_statement).collect()
}

/// Share of `extracted` statements found in `before_parent` and no longer in
/// `after_parent`, with the moved count.
pub fn overlap(
    extracted: &BTreeSet<String>,
    before_parent: &BTreeSet<String>,
    after_parent: &BTreeSet<String>,
) -> (f64, usize) {
    if extracted.is_empty() {
        return (0.0, 0);
    }
    let moved = extracted.iter().filter(|s| before_parent.contains(*s) && !after_parent.contains(*s)).count();
    (moved as f64 / extracted.len() as f64, moved)
}

fn calls(method: &MethodModel, name: &str) -> bool {
    method.invocations().iter().any(|i| i.callee == name)
}

fn class_instances(before: &ClassModel, after: &ClassModel, commit: &str) -> Vec<ExtractMethodInstance> {
    let mut out = Vec::new();
    let parents: Vec<(&MethodModel, &MethodModel)> = after
        .methods
        .iter()
        .filter_map(|a| before.method(&a.signature).map(|b| (b, a)))
        .collect();
    for extracted in &after.methods {
        if extracted.is_constructor || before.method(&extracted.signature).is_some() {
            continue;
        }
        let ext_set = statement_set(extracted);
        let mut best: Option<(f64, &str)> = None;
        for (p_before, p_after) in &parents {
            if !calls(p_after, &extracted.name) {
                continue;
            }
            let (ratio, moved) = overlap(&ext_set, &statement_set(p_before), &statement_set(p_after));
            if moved == 0 || ratio < OVERLAP_THRESHOLD {
                continue;
            }
            let sig = p_after.signature.as_str();
            let better = match best {
                None => true,
                Some((r, s)) => ratio > r || (ratio == r && sig < s),
            };
            if better {
                best = Some((ratio, sig));
            }
        }
        if let Some((ratio, sig)) = best {
            out.push(ExtractMethodInstance {
                parent_method: MethodRef { class: after.qualified_name.clone(), signature: sig.to_string() },
                extracted_method: MethodRef {
                    class: after.qualified_name.clone(),
                    signature: extracted.signature.clone(),
                },
                overlap_ratio: ratio,
                commit: commit.to_string(),
            });
        }
    }
    out
}

/// Every Extract Method instance between `before` and `after`, in class and
/// then extracted-method declaration order.
pub fn detect_extract_method(before: &CodeModel, after: &CodeModel, commit: &str) -> Vec<ExtractMethodInstance> {
    after
        .classes
        .iter()
        .filter_map(|a| before.class(&a.qualified_name).map(|b| class_instances(b, a, commit)))
        .flatten()
        .collect()
}

/// Classes of `before` touched by a refactoring: parents of extractions, and
/// classes that lost a method whose body shows up again in some method of
/// the after version (moves and renames).
pub fn refactored_classes(before: &CodeModel, after: &CodeModel) -> BTreeSet<String> {
    let mut out: BTreeSet<String> =
        detect_extract_method(before, after, "").into_iter().map(|i| i.parent_method.class).collect();

    let after_bodies: Vec<BTreeSet<String>> =
        after.classes.iter().flat_map(|c| c.methods.iter().map(statement_set)).collect();
    for class in &before.classes {
        let survivor = after.class(&class.qualified_name);
        for method in &class.methods {
            if survivor.is_some_and(|c| c.method(&method.signature).is_some()) {
                continue;
            }
            let body = statement_set(method);
            if body.is_empty() {
                continue;
            }
            let reappears = after_bodies.iter().any(|other| {
                let shared = body.intersection(other).count();
                shared as f64 / body.len() as f64 >= OVERLAP_THRESHOLD
            });
            if reappears {
                out.insert(class.qualified_name.clone());
            }
        }
    }
    out
}

pub fn detect_any_refactoring(before: &CodeModel, after: &CodeModel) -> bool {
    !refactored_classes(before, after).is_empty()
}
