//! Labelling methods from Git history.
//!
//! The miner walks first-parent history oldest to newest. For every commit
//! pair it compares the changed `.java` files:
//!
//! * each detected Extract Method yields a positive for the parent method,
//!   measured on the parent commit;
//! * every class whose file changed without a refactoring moves one step
//!   closer to the stability threshold `s`; on reaching it each of its
//!   methods yields a negative measured on the current commit.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::process::Command;

use rayon::prelude::*;

use crate::detect::{detect_extract_method, refactored_classes};
use crate::java::{parse_compilation_unit_bytes, CodeModel};
use crate::metrics::{compute_class_metrics, compute_method_metrics, feature_vector};

pub const DEFAULT_S_THRESHOLD: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum MinerError {
    #[error("not a git repository: {0}")]
    RepoNotFound(String),
    #[error("branch not found: {0}")]
    BranchNotFound(String),
    #[error("git {args}: {message}")]
    Git { args: String, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningConfig {
    pub s_threshold: usize,
    /// Branch or revision to walk; `HEAD` by default.
    pub branch: String,
    pub project_id: String,
}

impl MiningConfig {
    pub fn new(project_id: impl Into<String>) -> Self {
        MiningConfig { s_threshold: DEFAULT_S_THRESHOLD, branch: "HEAD".into(), project_id: project_id.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinedInstance {
    pub project: String,
    /// Commit whose file version the features were measured on.
    pub commit: String,
    /// Package-qualified class name.
    pub class: String,
    pub method: String,
    pub label: bool,
    pub features: Vec<f64>,
}

/// Consecutive non-refactoring changes per class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StabilityCounter {
    pub counts: BTreeMap<String, usize>,
}

impl StabilityCounter {
    pub fn get(&self, class: &str) -> usize {
        self.counts.get(class).copied().unwrap_or(0)
    }
}

/// One commit's update of the stability counter. Returns the new counter and
/// the classes that reached `s` (their count is reset).
pub fn advance_stability(
    counter: &StabilityCounter,
    class_changes: &BTreeSet<String>,
    refactored_classes: &BTreeSet<String>,
    s: usize,
) -> (StabilityCounter, BTreeSet<String>) {
    let mut next = counter.clone();
    let mut due = BTreeSet::new();
    for class in refactored_classes {
        next.counts.insert(class.clone(), 0);
    }
    for class in class_changes.difference(refactored_classes) {
        let count = next.counts.entry(class.clone()).or_insert(0);
        *count += 1;
        if *count >= s {
            *count = 0;
            due.insert(class.clone());
        }
    }
    (next, due)
}

struct Git<'a> {
    repo: &'a Path,
}

impl Git<'_> {
    fn run(&self, args: &[&str]) -> Result<Vec<u8>, MinerError> {
        let out = Command::new("git")
            .arg("-C")
            .arg(self.repo)
            .args(args)
            .output()
            .map_err(|e| MinerError::Git { args: args.join(" "), message: e.to_string() })?;
        if !out.status.success() {
            return Err(MinerError::Git {
                args: args.join(" "),
                message: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            });
        }
        Ok(out.stdout)
    }

    fn text(&self, args: &[&str]) -> Result<String, MinerError> {
        Ok(String::from_utf8_lossy(&self.run(args)?).into_owned())
    }

    fn show(&self, commit: &str, path: &str) -> Result<Vec<u8>, MinerError> {
        self.run(&["show", &format!("{commit}:{path}")])
    }
}

#[derive(Debug, PartialEq)]
enum Change {
    Modified { path: String },
    Renamed { from: String, to: String, identical: bool },
    Added { path: String },
    Deleted { path: String },
}

fn changes(git: &Git<'_>, parent: &str, child: &str) -> Result<Vec<Change>, MinerError> {
    let raw = git.text(&["diff-tree", "-r", "-M50%", "--name-status", "--no-commit-id", parent, child])?;
    let mut out = Vec::new();
    for line in raw.lines() {
        let parts: Vec<&str> = line.split('\t').collect();
        let java = |p: &str| p.ends_with(".java");
        match parts.as_slice() {
            [status, from, to] if status.starts_with('R') && (java(from) || java(to)) => out.push(Change::Renamed {
                from: from.to_string(),
                to: to.to_string(),
                identical: *status == "R100",
            }),
            [status, _, to] if status.starts_with('C') && java(to) => out.push(Change::Added { path: to.to_string() }),
            ["M", path] | ["T", path] if java(path) => out.push(Change::Modified { path: path.to_string() }),
            ["A", path] if java(path) => out.push(Change::Added { path: path.to_string() }),
            ["D", path] if java(path) => out.push(Change::Deleted { path: path.to_string() }),
            _ => {}
        }
    }
    Ok(out)
}

fn parse_version(git: &Git<'_>, commit: &str, path: &str) -> Option<CodeModel> {
    let bytes = match git.show(commit, path) {
        Ok(b) => b,
        Err(e) => {
            log::warn!("skipping {path}@{commit}: {e}");
            return None;
        }
    };
    match parse_compilation_unit_bytes(&bytes, path) {
        Ok(model) => Some(model),
        Err(e) => {
            log::warn!("skipping {path}@{commit}: {e}");
            None
        }
    }
}

fn instances_for_class(
    model: &CodeModel,
    class: &str,
    methods: Option<&str>,
    project: &str,
    commit: &str,
    label: bool,
) -> Vec<MinedInstance> {
    let Some(c) = model.class(class) else { return Vec::new() };
    let cv = compute_class_metrics(c);
    c.methods
        .iter()
        .filter(|m| methods.is_none_or(|sig| m.signature == sig))
        .map(|m| MinedInstance {
            project: project.to_string(),
            commit: commit.to_string(),
            class: class.to_string(),
            method: m.signature.clone(),
            label,
            features: feature_vector(&cv, &compute_method_metrics(m, c)),
        })
        .collect()
}

/// First-parent history of `branch`, oldest first.
fn history(git: &Git<'_>, branch: &str) -> Result<Vec<String>, MinerError> {
    let rev = format!("{branch}^{{commit}}");
    if git.run(&["rev-parse", "--verify", "--quiet", &rev]).is_err() {
        return Err(MinerError::BranchNotFound(branch.to_string()));
    }
    Ok(git.text(&["rev-list", "--first-parent", "--reverse", branch])?.lines().map(str::to_string).collect())
}

pub fn mine_repository(repo: &Path, config: &MiningConfig) -> Result<Vec<MinedInstance>, MinerError> {
    if config.s_threshold == 0 {
        return Err(MinerError::Config("s_threshold must be at least 1".into()));
    }
    let git = Git { repo };
    let inside = git.text(&["rev-parse", "--is-inside-work-tree"]).map(|s| s.trim() == "true");
    let bare = git.text(&["rev-parse", "--is-bare-repository"]).map(|s| s.trim() == "true");
    if !repo.exists() || !(inside.unwrap_or(false) || bare.unwrap_or(false)) {
        return Err(MinerError::RepoNotFound(repo.display().to_string()));
    }
    let commits = history(&git, &config.branch)?;
    let project = config.project_id.as_str();

    // (commit index, instance)
    let mut found: Vec<(usize, MinedInstance)> = Vec::new();
    let mut counter = StabilityCounter::default();

    for (idx, pair) in commits.windows(2).enumerate() {
        let (parent, child) = (&pair[0], &pair[1]);
        let mut changed = BTreeSet::new();
        let mut refactored = BTreeSet::new();
        let mut after_models: Vec<CodeModel> = Vec::new();

        for change in changes(&git, parent, child)? {
            let (from, to) = match &change {
                Change::Modified { path } => (path.as_str(), path.as_str()),
                Change::Renamed { from, to, identical } => {
                    if *identical {
                        continue;
                    }
                    (from.as_str(), to.as_str())
                }
                Change::Deleted { path } => {
                    if let Some(before) = parse_version(&git, parent, path) {
                        for c in &before.classes {
                            counter.counts.remove(&c.qualified_name);
                        }
                    }
                    continue;
                }
                Change::Added { .. } => continue,
            };
            let (Some(before), Some(after)) = (parse_version(&git, parent, from), parse_version(&git, child, to))
            else {
                continue;
            };
            for inst in detect_extract_method(&before, &after, child) {
                let class = &inst.parent_method.class;
                found.extend(
                    instances_for_class(&before, class, Some(&inst.parent_method.signature), project, parent, true)
                        .into_iter()
                        .map(|i| (idx, i)),
                );
            }
            refactored.extend(refactored_classes(&before, &after));
            changed.extend(after.classes.iter().map(|c| c.qualified_name.clone()));
            after_models.push(after);
        }

        let (next, due) = advance_stability(&counter, &changed, &refactored, config.s_threshold);
        counter = next;
        for class in &due {
            if let Some(model) = after_models.iter().find(|m| m.class(class).is_some()) {
                found.extend(
                    instances_for_class(model, class, None, project, child, false).into_iter().map(|i| (idx + 1, i)),
                );
            }
        }
    }

    // One positive per parent method and commit; a positive wins over a
    // negative for the same method version.
    let positives: HashSet<(String, String, String)> =
        found.iter().filter(|(_, i)| i.label).map(|(_, i)| (i.commit.clone(), i.class.clone(), i.method.clone())).collect();
    let mut seen = HashSet::new();
    found.retain(|(_, i)| {
        let key = (i.commit.clone(), i.class.clone(), i.method.clone());
        if !i.label && positives.contains(&key) {
            return false;
        }
        seen.insert((key, i.label))
    });
    found.sort_by(|(a, x), (b, y)| a.cmp(b).then_with(|| x.class.cmp(&y.class)).then_with(|| x.method.cmp(&y.method)));
    log::info!(
        "{project}: {} commits, {} positives, {} negatives",
        commits.len(),
        found.iter().filter(|(_, i)| i.label).count(),
        found.iter().filter(|(_, i)| !i.label).count()
    );
    Ok(found.into_iter().map(|(_, i)| i).collect())
}

/// Mines several repositories in parallel; results are concatenated in the
/// order of the input list.
pub fn mine_repositories(repos: &[(PathBuf, MiningConfig)]) -> Result<Vec<MinedInstance>, MinerError> {
    let results: Vec<Result<Vec<MinedInstance>, MinerError>> =
        repos.par_iter().map(|(path, config)| mine_repository(path, config)).collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn threshold_reached() {
        let mut c = StabilityCounter::default();
        c.counts.insert("A".into(), 2);
        let (next, due) = advance_stability(&c, &set(&["A"]), &set(&[]), 3);
        assert_eq!(due, set(&["A"]));
        assert_eq!(next.get("A"), 0);
    }

    #[test]
    fn refactoring_resets() {
        let mut c = StabilityCounter::default();
        c.counts.insert("A".into(), 2);
        let (next, due) = advance_stability(&c, &set(&["A"]), &set(&["A"]), 3);
        assert!(due.is_empty());
        assert_eq!(next.get("A"), 0);
    }

    #[test]
    fn unchanged_classes_keep_their_count() {
        let mut c = StabilityCounter::default();
        c.counts.insert("A".into(), 2);
        let (next, due) = advance_stability(&c, &set(&["B"]), &set(&[]), 3);
        assert!(due.is_empty());
        assert_eq!(next.get("A"), 2);
        assert_eq!(next.get("B"), 1);
    }

    #[test]
    fn threshold_one_fires_every_change() {
        let (next, due) = advance_stability(&StabilityCounter::default(), &set(&["A"]), &set(&[]), 1);
        assert_eq!(due, set(&["A"]));
        assert_eq!(next.get("A"), 0);
    }

    #[test]
    fn missing_repository() {
        let err = mine_repository(Path::new("/nonexistent/repo"), &MiningConfig::new("p")).unwrap_err();
        assert!(matches!(err, MinerError::RepoNotFound(_)));
    }
}
