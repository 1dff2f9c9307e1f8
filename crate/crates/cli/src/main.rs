//! `refscout`: mine Java histories, train Extract Method recommenders and
//! score new code.

mod table;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use refscout_core::bundle::{load_bundle, save_bundle, ModelBundle};
use refscout_core::dataset::Dataset;
use refscout_core::evaluation::{cross_corpus_evaluate, distributions, leave_one_project_out, EvaluationReport};
use refscout_core::java::parse_compilation_unit;
use refscout_core::learners::AlgorithmKind;
use refscout_core::metrics::{feature_names, unit_features};
use refscout_core::miner::{mine_repositories, MiningConfig, DEFAULT_S_THRESHOLD};
use refscout_core::pipeline::{
    bundle_importance, distributions_csv, evaluate_bundle, evaluation_csv, importance_csv, loo_csv, predict_source,
    run_training, training_report_csv, TrainingOptions,
};

use table::Table;

#[derive(Parser)]
#[command(name = "refscout", version, about = "Extract Method recommendation for Java code")]
struct Cli {
    /// Master seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Log progress to standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
    /// Leave wall-clock timestamps out of written files.
    #[arg(long, global = true)]
    reproducible: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label methods from the Git history of one or more repositories.
    Mine(MineArgs),
    /// Per-file metric output.
    Metrics {
        #[command(subcommand)]
        command: MetricsCommand,
    },
    /// Tune, compare and persist classifiers.
    Train(TrainArgs),
    /// Score a labelled dataset with a saved model.
    Evaluate(EvaluateArgs),
    /// Train on one corpus and test on another.
    Cross(CrossArgs),
    /// Leave-one-project-out evaluation.
    Loo(LooArgs),
    /// Permutation feature importance of a saved model.
    Importance(ImportanceArgs),
    /// Recommend Extract Method candidates in a Java file.
    Predict(PredictArgs),
    /// Dataset summaries.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

#[derive(Args)]
struct MineArgs {
    /// Repository directories.
    #[arg(required = true)]
    repos: Vec<PathBuf>,
    /// Dataset CSV to write; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Non-refactoring changes before a class counts as stable.
    #[arg(long = "s", default_value_t = DEFAULT_S_THRESHOLD)]
    s_threshold: usize,
    /// Branch or revision to walk.
    #[arg(long, default_value = "HEAD")]
    branch: String,
    /// Lines of `path,project_id`; unlisted repositories use their directory name.
    #[arg(long)]
    project_map: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MetricsCommand {
    /// All 61 features of every method in a file, as CSV.
    Dump {
        file: PathBuf,
        /// Only this method signature, e.g. `add(int)`.
        #[arg(long)]
        method: Option<String>,
    },
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// rf, dt, lr, svm, nb or all.
    #[arg(long, default_value = "all")]
    algo: String,
    /// Bundle path for the production model.
    #[arg(long)]
    out: PathBuf,
    /// Per-algorithm results as CSV.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Writes the held-out test split as a dataset CSV.
    #[arg(long)]
    holdout: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CrossArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value = "rf")]
    algo: AlgorithmKind,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LooArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value = "rf")]
    algo: AlgorithmKind,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ImportanceArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 50)]
    repeats: usize,
    /// Rows shown in the table; the CSV always has all features.
    #[arg(long, default_value_t = 15)]
    top: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    file: PathBuf,
    /// Only this method signature.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Median and quartiles per metric for refactored and other methods.
    Distributions {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "loc,rfc,wmc,uw,cbo,tcc,lcc")]
        metrics: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("REFSCOUT_LOG", default_level))
        .format_timestamp(None)
        .init();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Mine(args) => mine(args),
        Command::Metrics { command: MetricsCommand::Dump { file, method } } => metrics_dump(file, method.as_deref()),
        Command::Train(args) => train(cli, args),
        Command::Evaluate(args) => evaluate(args),
        Command::Cross(args) => cross(cli, args),
        Command::Loo(args) => loo(cli, args),
        Command::Importance(args) => importance(cli, args),
        Command::Predict(args) => predict(args),
        Command::Report { command: ReportCommand::Distributions { dataset, metrics, out } } => {
            report_distributions(dataset, metrics, out.as_deref())
        }
    }
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    Ok(Dataset::read(path)?)
}

fn read_bundle(path: &Path) -> Result<ModelBundle> {
    load_bundle(path).with_context(|| format!("cannot load model {}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn project_map(path: &Path) -> Result<Vec<(PathBuf, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((repo, id)) = line.rsplit_once(',') else {
            bail!("{}:{}: expected `path,project_id`", path.display(), n + 1);
        };
        out.push((PathBuf::from(repo.trim()), id.trim().to_string()));
    }
    Ok(out)
}

fn project_id(repo: &Path, map: &[(PathBuf, String)]) -> String {
    let canonical = |p: &Path| fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf());
    let here = canonical(repo);
    if let Some((_, id)) = map.iter().find(|(p, _)| canonical(p) == here) {
        return id.clone();
    }
    here.file_name().map_or_else(|| repo.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn mine(args: &MineArgs) -> Result<()> {
    if args.s_threshold == 0 {
        bail!("--s must be at least 1");
    }
    let map = match &args.project_map {
        Some(p) => project_map(p)?,
        None => Vec::new(),
    };
    let jobs: Vec<(PathBuf, MiningConfig)> = args
        .repos
        .iter()
        .map(|repo| {
            let mut config = MiningConfig::new(project_id(repo, &map));
            config.s_threshold = args.s_threshold;
            config.branch = args.branch.clone();
            (repo.clone(), config)
        })
        .collect();
    log::info!("mining {} repositories with s = {}", jobs.len(), args.s_threshold);
    let instances = mine_repositories(&jobs)?;

    let mut ds = Dataset::new(instances);
    ds.metadata.push(("s-threshold".into(), args.s_threshold.to_string()));
    ds.metadata.push(("branch".into(), args.branch.clone()));
    let projects: Vec<&str> = jobs.iter().map(|(_, c)| c.project_id.as_str()).collect();
    ds.metadata.push(("projects".into(), projects.join(" ")));
    match &args.out {
        Some(path) => {
            ds.write(path)?;
            let mut t = Table::new(&["project", "positives", "negatives"]);
            for (project, part) in ds.by_project() {
                let (pos, neg) = part.class_counts();
                t.row(vec![project, pos.to_string(), neg.to_string()]);
            }
            let (pos, neg) = ds.class_counts();
            t.row(vec!["total".into(), pos.to_string(), neg.to_string()]);
            print!("{t}");
        }
        None => print!("{}", ds.to_csv()),
    }
    Ok(())
}

fn metrics_dump(file: &Path, method: Option<&str>) -> Result<()> {
    let source = fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    let model = parse_compilation_unit(&source, &file.display().to_string())
        .with_context(|| format!("cannot parse {}", file.display()))?;
    let mut out = format!("class,method,{}\n", feature_names().join(","));
    let mut found = false;
    for (class, sig, features) in unit_features(&model) {
        if method.is_some_and(|m| m != sig) {
            continue;
        }
        found = true;
        let values: Vec<String> = features.iter().map(f64::to_string).collect();
        out.push_str(&format!("{class},\"{sig}\",{}\n", values.join(",")));
    }
    if let (Some(m), false) = (method, found) {
        bail!("no method `{m}` in {}", file.display());
    }
    print!("{out}");
    Ok(())
}

fn algorithms(name: &str) -> Result<Vec<AlgorithmKind>> {
    if name == "all" {
        return Ok(AlgorithmKind::ALL.to_vec());
    }
    name.split(',').map(|n| n.trim().parse::<AlgorithmKind>().map_err(anyhow::Error::msg)).collect()
}

fn report_table(rows: &[(String, EvaluationReport)]) -> Table {
    let mut t = Table::new(&["name", "accuracy", "precision", "recall", "f1", "tp", "fp", "fn", "tn"]);
    for (name, r) in rows {
        let c = r.confusion;
        t.row(vec![
            name.clone(),
            format!("{:.4}", r.accuracy),
            format!("{:.4}", r.precision),
            format!("{:.4}", r.recall),
            format!("{:.4}", r.f1),
            c.tp.to_string(),
            c.fp.to_string(),
            c.fn_.to_string(),
            c.tn.to_string(),
        ]);
    }
    t
}

fn train(cli: &Cli, args: &TrainArgs) -> Result<()> {
    let ds = read_dataset(&args.dataset)?;
    let mut options = TrainingOptions::new(algorithms(&args.algo)?, cli.seed);
    options.folds = args.folds;
    options.test_fraction = args.test_fraction;
    let outcome = run_training(&ds, &options)?;

    let mut bundle = outcome.bundle.clone();
    if !cli.reproducible {
        bundle.stamp_now();
    }
    save_bundle(&bundle, &args.out)?;
    if let Some(path) = &args.report {
        write_output(Some(path), &training_report_csv(&outcome))?;
    }
    if let Some(path) = &args.holdout {
        outcome.test_set.write(path)?;
    }

    let rows: Vec<(String, EvaluationReport)> =
        outcome.algorithms.iter().map(|a| (a.kind.to_string(), a.test)).collect();
    println!("train {} / test {}", outcome.train_size, outcome.test_size);
    print!("{}", report_table(&rows));
    println!("production model: {} -> {}", outcome.best, args.out.display());
    Ok(())
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let bundle = read_bundle(&args.model)?;
    let ds = read_dataset(&args.dataset)?;
    let report = evaluate_bundle(&bundle, &ds)?;
    let name = bundle.model.spec.kind.to_string();
    if let Some(path) = &args.out {
        write_output(Some(path), &evaluation_csv(&name, &report))?;
    }
    print!("{}", report_table(&[(name, report)]));
    Ok(())
}

fn cross(cli: &Cli, args: &CrossArgs) -> Result<()> {
    let train_set = read_dataset(&args.train)?;
    let test_set = read_dataset(&args.test)?;
    let r = cross_corpus_evaluate(&train_set, &test_set, args.algo, &args.algo.default_space(), args.folds, cli.seed)?;
    let name = args.algo.to_string();
    if let Some(path) = &args.out {
        write_output(Some(path), &evaluation_csv(&name, &r.report))?;
    }
    print!("{}", report_table(&[(name, r.report)]));
    Ok(())
}

fn loo(cli: &Cli, args: &LooArgs) -> Result<()> {
    let ds = read_dataset(&args.dataset)?;
    let report = leave_one_project_out(&ds, args.algo, &args.algo.default_space(), args.folds, cli.seed)?;
    if let Some(path) = &args.out {
        write_output(Some(path), &loo_csv(&report))?;
    }
    let rows: Vec<(String, EvaluationReport)> =
        report.projects.iter().map(|p| (p.project.clone(), p.result.report)).collect();
    let mut t = report_table(&rows);
    let m = report.mean;
    t.row(vec![
        "mean".into(),
        format!("{:.4}", m.accuracy),
        format!("{:.4}", m.precision),
        format!("{:.4}", m.recall),
        format!("{:.4}", m.f1),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
    ]);
    print!("{t}");
    Ok(())
}

fn importance(cli: &Cli, args: &ImportanceArgs) -> Result<()> {
    let bundle = read_bundle(&args.model)?;
    let ds = read_dataset(&args.dataset)?;
    let report = bundle_importance(&bundle, &ds, args.repeats, cli.seed)?;
    if let Some(path) = &args.out {
        write_output(Some(path), &importance_csv(&report))?;
    }
    println!("baseline F1 {:.4}, {} repeats", report.baseline_f1, report.repeats);
    let mut t = Table::new(&["rank", "feature", "mean drop", "std"]);
    for (rank, f) in report.features.iter().take(args.top).enumerate() {
        t.row(vec![(rank + 1).to_string(), f.name.clone(), format!("{:.4}", f.mean_drop), format!("{:.4}", f.std_drop)]);
    }
    print!("{t}");
    Ok(())
}

fn predict(args: &PredictArgs) -> Result<()> {
    let bundle = read_bundle(&args.model)?;
    let source = fs::read_to_string(&args.file).with_context(|| format!("cannot read {}", args.file.display()))?;
    let mut preds = predict_source(&bundle, &source, &args.file.display().to_string())
        .with_context(|| format!("cannot score {}", args.file.display()))?;
    if let Some(m) = &args.method {
        preds.retain(|p| &p.method == m);
        if preds.is_empty() {
            bail!("no method `{m}` in {}", args.file.display());
        }
    }
    let mut t = Table::new(&["class", "method", "extract", "score"]);
    for p in preds {
        t.row(vec![p.class, p.method, if p.recommend { "yes" } else { "no" }.into(), format!("{:.4}", p.score)]);
    }
    print!("{t}");
    Ok(())
}

fn report_distributions(dataset: &Path, metrics: &[String], out: Option<&Path>) -> Result<()> {
    let ds = read_dataset(dataset)?;
    let summaries = distributions(&ds, metrics)?;
    let csv = distributions_csv(&summaries);
    match out {
        Some(path) => {
            write_output(Some(path), &csv)?;
            let mut t = Table::new(&["metric", "group", "n", "median", "IQR"]);
            for d in &summaries {
                t.row(vec![
                    d.metric.clone(),
                    d.group.clone(),
                    d.n.to_string(),
                    format!("{}", d.median),
                    format!("[{}, {}]", d.q1, d.q3),
                ]);
            }
            print!("{t}");
        }
        None => print!("{csv}"),
    }
    Ok(())
}
