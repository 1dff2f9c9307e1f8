//! Java sources and scripted histories with known refactorings.

use crate::gitrepo::ScriptedRepo;

pub const PACKAGE: &str = "shop";
pub const PROCESS_SIGNATURE: &str = "process(int[],int)";

fn path_of(class: &str) -> String {
    format!("src/main/java/{PACKAGE}/{class}.java")
}

/// Statements moved out of `process` by the planted extraction.
fn block(index: usize, len: usize) -> Vec<String> {
    (0..len)
        .map(|k| {
            if k % 3 == 2 {
                format!("if (sum > {}) {{\n            max += {};\n        }}", 100 * index + k, k + 1)
            } else {
                format!("max = Math.max(max, sum * {} + {});", k + 2, 10 * index + k)
            }
        })
        .collect()
}

/// A ledger class whose `process` method is long and branchy. With
/// `extracted` set, the tail block lives in a private `combine` method.
pub fn ledger_source(index: usize, block_len: usize, extracted: bool) -> String {
    let stmts = block(index, block_len);
    let mut s = format!(
        "package {PACKAGE};\n\npublic class Ledger{index} {{\n    private int total;\n    private int count;\n\n    public Ledger{index}(int seed) {{\n        this.total = seed;\n    }}\n\n    public int process(int[] values, int limit) {{\n        int sum = 0;\n        int max = 0;\n        for (int k = 0; k < values.length; k++) {{\n            if (values[k] > limit) {{\n                sum += values[k];\n                count++;\n            }} else if (values[k] < 0) {{\n                sum -= values[k];\n            }}\n        }}\n"
    );
    if extracted {
        s.push_str("        max = combine(sum, max);\n");
    } else {
        for st in &stmts {
            s.push_str(&format!("        {st}\n"));
        }
    }
    s.push_str("        total += sum;\n        return sum + max;\n    }\n");
    if extracted {
        s.push_str("\n    private int combine(int sum, int max) {\n");
        for st in &stmts {
            s.push_str(&format!("        {st}\n"));
        }
        s.push_str("        return max;\n    }\n");
    }
    s.push_str("\n    public int total() {\n        return total;\n    }\n}\n");
    s
}

/// A class that only grows: `extras` methods, each called from `run`.
pub fn decoy_source(index: usize, extras: usize) -> String {
    let mut s = format!("package {PACKAGE};\n\npublic class Decoy{index} {{\n    private int base = {index};\n\n    public int run(int x) {{\n        int y = x + base;\n");
    for e in 0..extras {
        s.push_str(&format!("        y += extra{e}(y);\n"));
    }
    s.push_str("        return y;\n    }\n");
    for e in 0..extras {
        s.push_str(&format!(
            "\n    private int extra{e}(int v) {{\n        int w = v * {};\n        w -= {};\n        return w;\n    }}\n",
            e + 3,
            index + e
        ));
    }
    s.push_str("}\n");
    s
}

/// A class whose helper is named `helper`.
pub fn renamer_source(index: usize, helper: &str) -> String {
    format!(
        "package {PACKAGE};\n\npublic class Renamer{index} {{\n    public int run(int x) {{\n        return {helper}(x) + 1;\n    }}\n\n    private int {helper}(int x) {{\n        int y = x * {};\n        y += 3;\n        return y;\n    }}\n}}\n",
        index + 2
    )
}

/// A small class with `index + 1` fields; `steps` one-line methods are
/// appended by stability edits.
pub fn small_source(index: usize, steps: usize) -> String {
    let mut s = format!("package {PACKAGE};\n\npublic class Small{index} {{\n");
    for f in 0..=index {
        s.push_str(&format!("    private int f{f};\n"));
    }
    s.push_str("\n    public int first() {\n        return f0;\n    }\n");
    s.push_str(&format!("\n    public void reset() {{\n        f0 = {index};\n    }}\n"));
    s.push_str("\n    public int twice(int v) {\n        int r = v + f0;\n        return r * 2;\n    }\n");
    for e in 0..steps {
        s.push_str(&format!("\n    public int step{e}() {{\n        return {};\n    }}\n", index + e));
    }
    s.push_str("}\n");
    s
}

#[derive(Debug, Clone)]
pub struct PlantedExtraction {
    /// Commit the positive is measured on.
    pub parent_commit: String,
    pub refactoring_commit: String,
    pub path: String,
    /// File content at `parent_commit`.
    pub parent_source: String,
    pub class: String,
    pub method: String,
}

pub struct PlantedRepo {
    pub repo: ScriptedRepo,
    pub extractions: Vec<PlantedExtraction>,
    pub addition_commits: Vec<String>,
    pub rename_commits: Vec<String>,
}

fn extract(repo: &mut ScriptedRepo, index: usize, block_len: usize) -> PlantedExtraction {
    let class = format!("Ledger{index}");
    let path = path_of(&class);
    let parent_source = repo.read(&path);
    let parent_commit = repo.commits().last().expect("initial commit").clone();
    repo.write(&path, &ledger_source(index, block_len, true));
    let refactoring_commit = repo.commit(&format!("Extract combine from Ledger{index}.process"));
    PlantedExtraction {
        parent_commit,
        refactoring_commit,
        path,
        parent_source,
        class: format!("{PACKAGE}.{class}"),
        method: PROCESS_SIGNATURE.into(),
    }
}

/// Ten extraction commits interleaved with five pure-addition and three
/// method-rename commits.
pub fn planted_repo() -> PlantedRepo {
    let mut repo = ScriptedRepo::new();
    for i in 0..10 {
        repo.write(&path_of(&format!("Ledger{i}")), &ledger_source(i, 4 + i % 3, false));
    }
    for d in 0..5 {
        repo.write(&path_of(&format!("Decoy{d}")), &decoy_source(d, 0));
    }
    for r in 0..3 {
        repo.write(&path_of(&format!("Renamer{r}")), &renamer_source(r, "compute"));
    }
    repo.commit("Initial import");

    // e = extraction, a = addition, r = rename
    let script = "eaereaeeraeeaereae";
    let (mut e, mut a, mut r) = (0, 0, 0);
    let mut out = PlantedRepo { repo, extractions: Vec::new(), addition_commits: Vec::new(), rename_commits: Vec::new() };
    for step in script.chars() {
        match step {
            'e' => {
                let x = extract(&mut out.repo, e, 4 + e % 3);
                out.extractions.push(x);
                e += 1;
            }
            'a' => {
                out.repo.write(&path_of(&format!("Decoy{a}")), &decoy_source(a, 1));
                out.addition_commits.push(out.repo.commit(&format!("Add extra0 to Decoy{a}")));
                a += 1;
            }
            'r' => {
                out.repo.write(&path_of(&format!("Renamer{r}")), &renamer_source(r, "calculate"));
                out.rename_commits.push(out.repo.commit(&format!("Rename compute in Renamer{r}")));
                r += 1;
            }
            _ => unreachable!(),
        }
    }
    assert_eq!((e, a, r), (10, 5, 3));
    out
}

pub struct StabilityRepo {
    pub repo: ScriptedRepo,
    pub class: String,
    pub methods: Vec<String>,
    /// Commit ids of the edits, in order.
    pub edits: Vec<String>,
}

/// One class edited trivially in `edits` consecutive commits.
pub fn stability_repo(edits: usize) -> StabilityRepo {
    let mut repo = ScriptedRepo::new();
    let path = path_of("Counter");
    let source = |v: usize| {
        format!(
            "package {PACKAGE};\n\npublic class Counter {{\n    private int value;\n\n    public int version() {{\n        return {v};\n    }}\n\n    public void bump() {{\n        value++;\n    }}\n\n    public int get() {{\n        return value;\n    }}\n}}\n"
        )
    };
    repo.write(&path, &source(0));
    repo.commit("Add Counter");
    let mut ids = Vec::new();
    for v in 1..=edits {
        repo.write(&path, &source(v));
        ids.push(repo.commit(&format!("Counter version {v}")));
    }
    StabilityRepo {
        repo,
        class: format!("{PACKAGE}.Counter"),
        methods: vec!["bump()".into(), "get()".into(), "version()".into()],
        edits: ids,
    }
}

/// History whose positives (long, branchy parent methods) and negatives
/// (small stable methods) are separable by size and complexity.
///
/// `positives` ledgers are each refactored once; `stable` small classes are
/// then all edited in `edits` consecutive commits.
pub fn separable_repo(positives: usize, stable: usize, edits: usize) -> ScriptedRepo {
    let mut repo = ScriptedRepo::new();
    for i in 0..positives {
        repo.write(&path_of(&format!("Ledger{i}")), &ledger_source(i, 3 + i, false));
    }
    for j in 0..stable {
        repo.write(&path_of(&format!("Small{j}")), &small_source(j, 0));
    }
    repo.commit("Initial import");
    for i in 0..positives {
        extract(&mut repo, i, 3 + i);
    }
    for e in 1..=edits {
        for j in 0..stable {
            repo.write(&path_of(&format!("Small{j}")), &small_source(j, e));
        }
        repo.commit(&format!("Add step{} everywhere", e - 1));
    }
    repo
}
