//! Scripted Git repositories with reproducible commit ids.
//!
//! Author, committer and dates are fixed per commit index, so the same
//! script always yields the same hashes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

pub struct ScriptedRepo {
    dir: TempDir,
    commits: Vec<String>,
}

impl ScriptedRepo {
    pub fn new() -> Self {
        let dir = tempfile::Builder::new().prefix("refscout-repo").tempdir().expect("temp dir");
        let repo = ScriptedRepo { dir, commits: Vec::new() };
        repo.git(&["init", "-q"]);
        repo.git(&["symbolic-ref", "HEAD", "refs/heads/main"]);
        repo
    }

    pub fn path(&self) -> &Path {
        self.dir.path()
    }

    /// Commit ids in creation order.
    pub fn commits(&self) -> &[String] {
        &self.commits
    }

    pub fn write(&self, rel: &str, content: &str) {
        let p = self.dir.path().join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).expect("create dirs");
        }
        fs::write(p, content).expect("write file");
    }

    pub fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.dir.path().join(rel)).expect("read file")
    }

    pub fn remove(&self, rel: &str) {
        self.git(&["rm", "-q", rel]);
    }

    pub fn rename(&self, from: &str, to: &str) {
        if let Some(parent) = self.dir.path().join(to).parent() {
            fs::create_dir_all(parent).expect("create dirs");
        }
        self.git(&["mv", from, to]);
    }

    /// Stages everything and commits; returns the new commit id.
    pub fn commit(&mut self, message: &str) -> String {
        self.git(&["add", "-A"]);
        let date = format!("{} +0000", 1_600_000_000 + 60 * self.commits.len() as u64);
        let status = Command::new("git")
            .arg("-C")
            .arg(self.dir.path())
            .args(["-c", "commit.gpgsign=false", "commit", "-q", "--allow-empty", "-m", message])
            .envs(identity(&date))
            .status()
            .expect("run git");
        assert!(status.success(), "git commit failed");
        let id = self.git(&["rev-parse", "HEAD"]).trim().to_string();
        self.commits.push(id.clone());
        id
    }

    pub fn git(&self, args: &[&str]) -> String {
        let out = Command::new("git").arg("-C").arg(self.dir.path()).args(args).envs(identity("1600000000 +0000")).output().expect("run git");
        assert!(out.status.success(), "git {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr));
        String::from_utf8_lossy(&out.stdout).into_owned()
    }

    /// Keeps the directory after the repo is dropped.
    pub fn keep(self) -> PathBuf {
        self.dir.keep()
    }
}

impl Default for ScriptedRepo {
    fn default() -> Self {
        Self::new()
    }
}

fn identity(date: &str) -> Vec<(&'static str, String)> {
    vec![
        ("GIT_AUTHOR_NAME", "Fixture".into()),
        ("GIT_AUTHOR_EMAIL", "fixture@example.com".into()),
        ("GIT_COMMITTER_NAME", "Fixture".into()),
        ("GIT_COMMITTER_EMAIL", "fixture@example.com".into()),
        ("GIT_AUTHOR_DATE", date.into()),
        ("GIT_COMMITTER_DATE", date.into()),
        ("GIT_CONFIG_NOSYSTEM", "1".into()),
        ("GIT_CONFIG_GLOBAL", "/dev/null".into()),
    ]
}
