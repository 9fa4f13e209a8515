//! `costboost` command line: reproducible survey-classification experiments.
//!
//! Every subcommand resolves its full configuration (including defaulted
//! flags and the seed), writes it next to its outputs, and writes all files
//! atomically. Exit codes: 0 success, 1 data or model error, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use costboost::bagging::{
    fit_bagged, oob_error_curve, permutation_importance, select_features,
    DEFAULT_IMPORTANCE_THRESHOLD, DEFAULT_N_TREES,
};
use costboost::boosting::{CostMatrix, EarlyStopSpec};
use costboost::dataset::{
    binarize, imbalance_profile, load_survey_csv, synth_survey_table, BinaryDataset, Label,
    SurveyTable,
};
use costboost::error::Error;
use costboost::eval::{
    compare_algorithms_with, comparison_rows, confusion_csv, cost_sweep, crossval, curve_csv,
    fit_model, importance_csv, long_csv, metrics, pretty_table, sweep_rows, LearnerSpec,
    ReportRow,
};
use costboost::model::{write_atomic, Model, ModelMeta};
use costboost::tree::TreeParams;

#[derive(Parser)]
#[command(
    name = "costboost",
    version,
    about = "Cost-sensitive ensemble classification for ordinal survey data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Profile the class imbalance of one target column.
    Profile(ProfileArgs),
    /// Fit a bagged ensemble and rank features by OOB permutation importance.
    Importance(ImportanceArgs),
    /// Select features above the importance threshold and refit on them.
    Select(SelectArgs),
    /// Train one model and write it to a model file.
    Train(TrainArgs),
    /// Cross-validated confusion matrices over an algorithms × costs grid.
    CostSweep(CostSweepArgs),
    /// Compare algorithms under one cost matrix.
    Compare(CompareArgs),
    /// Precision/recall/accuracy of one algorithm under cross-validation.
    Metrics(MetricsArgs),
    /// Generate a synthetic ordinal survey dataset.
    Synth(SynthArgs),
    /// Apply a saved model to new rows.
    Predict(PredictArgs),
}

#[derive(Args)]
struct CommonIo {
    /// Output directory for reports and the resolved-config file.
    #[arg(long, env = "COSTBOOST_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    /// RNG seed recorded in the resolved config.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    input: PathBuf,
    /// Target column to profile.
    #[arg(long)]
    target: String,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct ImportanceArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    target: String,
    /// Binarization threshold: ratings at or above it count as favor.
    #[arg(long, default_value_t = 4)]
    threshold: u8,
    #[arg(long, default_value_t = DEFAULT_N_TREES)]
    trees: usize,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 4)]
    threshold: u8,
    #[arg(long, default_value_t = DEFAULT_N_TREES)]
    trees: usize,
    /// Importance score a feature must exceed to be kept.
    #[arg(long, default_value_t = DEFAULT_IMPORTANCE_THRESHOLD)]
    importance_threshold: f64,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 4)]
    threshold: u8,
    /// One of: adaboost, gentleboost, bagging, svm.
    #[arg(long)]
    algorithm: String,
    /// Cost matrix, row-major: c(dislike,dislike),c(dislike,favor),
    /// c(favor,dislike),c(favor,favor).
    #[arg(long, default_value = "0,1,1,0")]
    cost: String,
    /// Boosting rounds.
    #[arg(long, default_value_t = 200)]
    rounds: usize,
    /// Trees in a bagged ensemble.
    #[arg(long, default_value_t = DEFAULT_N_TREES)]
    trees: usize,
    /// Weak-learner depth for boosting (bagging uses deep trees).
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
    /// Disable the early-stopping holdout for boosting.
    #[arg(long, default_value_t = false)]
    no_early_stop: bool,
    #[arg(long, default_value_t = 20)]
    patience: usize,
    /// SVM box constraint.
    #[arg(long, default_value_t = 1.0)]
    svm_c: f64,
    /// Where to write the model file.
    #[arg(long)]
    model_out: Option<PathBuf>,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct CostSweepArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 4)]
    threshold: u8,
    /// Comma-separated algorithms to sweep.
    #[arg(long, default_value = "gentleboost,adaboost")]
    algorithms: String,
    /// Semicolon-separated cost matrices, each row-major.
    #[arg(long, default_value = "0,1,1,0;0,5,1,0;0,2,1,0")]
    costs: String,
    #[arg(long, default_value_t = 200)]
    rounds: usize,
    #[arg(long, default_value_t = DEFAULT_N_TREES)]
    trees: usize,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 4)]
    threshold: u8,
    #[arg(long, default_value = "0,5,1,0")]
    cost: String,
    #[arg(long, default_value = "adaboost,bagging,svm")]
    algorithms: String,
    #[arg(long, default_value_t = 200)]
    rounds: usize,
    #[arg(long, default_value_t = DEFAULT_N_TREES)]
    trees: usize,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 4)]
    threshold: u8,
    #[arg(long, default_value = "adaboost")]
    algorithm: String,
    #[arg(long, default_value = "0,5,1,0")]
    cost: String,
    #[arg(long, default_value_t = 200)]
    rounds: usize,
    #[arg(long, default_value_t = DEFAULT_N_TREES)]
    trees: usize,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Positive class for precision and recall: favor or dislike.
    #[arg(long, default_value = "favor")]
    positive_class: String,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    favor_fraction: f64,
    /// Number of predictor columns.
    #[arg(long, default_value_t = 10)]
    features: usize,
    /// Comma-separated indices of informative features.
    #[arg(long, default_value = "")]
    informative: String,
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// Output CSV path (defaults to synth.csv in the output directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct PredictArgs {
    /// Model file written by `train`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    io: CommonIo,
}

enum CliError {
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Profile(args) => cmd_profile(args),
        Command::Importance(args) => cmd_importance(args),
        Command::Select(args) => cmd_select(args),
        Command::Train(args) => cmd_train(args),
        Command::CostSweep(args) => cmd_cost_sweep(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Predict(args) => cmd_predict(args),
    }
}

// ---------------------------------------------------------------------------
// Flag parsing helpers (usage errors)
// ---------------------------------------------------------------------------

fn parse_cost(text: &str) -> Result<CostMatrix, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!(
            "--cost expects 4 comma-separated reals, got {text:?}"
        )));
    }
    let mut v = [0.0f64; 4];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| CliError::Usage(format!("bad cost entry {part:?}")))?;
    }
    CostMatrix::new([[v[0], v[1]], [v[2], v[3]]])
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_costs(text: &str) -> Result<Vec<CostMatrix>, CliError> {
    let costs: Result<Vec<CostMatrix>, CliError> = text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_cost)
        .collect();
    let costs = costs?;
    if costs.is_empty() {
        return Err(CliError::Usage("--costs is empty".into()));
    }
    Ok(costs)
}

fn parse_algorithm(
    name: &str,
    rounds: usize,
    trees: usize,
    max_depth: usize,
    stop: Option<EarlyStopSpec>,
    svm_c: f64,
) -> Result<LearnerSpec, CliError> {
    let weak = TreeParams::new(max_depth, 1e-9, 0.0).map_err(|e| CliError::Usage(e.to_string()))?;
    match name.trim() {
        "adaboost" | "adaboost-m1" => Ok(LearnerSpec::AdaBoost {
            rounds,
            weak,
            stop,
        }),
        "gentleboost" => Ok(LearnerSpec::GentleBoost {
            rounds,
            weak,
            stop,
        }),
        "bagging" => Ok(LearnerSpec::Bagging {
            n_trees: trees,
            params: TreeParams::bagging_default(),
        }),
        "svm" | "linear-svm" => Ok(LearnerSpec::Svm {
            c: svm_c,
            tol: 1e-3,
            max_passes: 200,
        }),
        "majority" => Ok(LearnerSpec::Majority),
        other => Err(CliError::Usage(format!(
            "unknown algorithm {other:?}; expected adaboost, gentleboost, bagging, or svm"
        ))),
    }
}

fn parse_algorithm_list(
    text: &str,
    rounds: usize,
    trees: usize,
) -> Result<Vec<LearnerSpec>, CliError> {
    let specs: Result<Vec<LearnerSpec>, CliError> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| parse_algorithm(name, rounds, trees, 3, Some(EarlyStopSpec::default()), 1.0))
        .collect();
    let specs = specs?;
    if specs.is_empty() {
        return Err(CliError::Usage("--algorithms is empty".into()));
    }
    Ok(specs)
}

fn parse_indices(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Usage(format!("bad feature index {s:?}")))
        })
        .collect()
}

fn parse_positive_class(text: &str) -> Result<Label, CliError> {
    Label::from_name(text.trim())
        .ok_or_else(|| CliError::Usage(format!("--positive-class must be favor or dislike, got {text:?}")))
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn load_binarized(input: &Path, target: &str, threshold: u8) -> Result<BinaryDataset, CliError> {
    let table = load_survey_csv(input, target)?;
    Ok(binarize(&table, target, threshold)?)
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

fn cost_slug(cost: &CostMatrix) -> String {
    slug(&cost.tag().replace('|', "_"))
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Run(Error::Io(e)))?;
    Ok(())
}

/// Write the resolved configuration for this run: every flag after
/// defaulting, in a fixed order, so a report can be regenerated from
/// (input, config) alone.
fn write_config(dir: &Path, command: &str, entries: &[(&str, String)]) -> Result<(), CliError> {
    let mut text = String::new();
    text.push_str(&format!("command = {command}\n"));
    for (key, value) in entries {
        text.push_str(&format!("{key} = {value}\n"));
    }
    write_atomic(dir.join(format!("{command}.config.txt")), &text)?;
    Ok(())
}

fn emit(path: &Path, contents: &str) -> Result<(), CliError> {
    write_atomic(path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_profile(args: ProfileArgs) -> Result<(), CliError> {
    let table = load_survey_csv(&args.input, &args.target)?;
    let profile = imbalance_profile(&table, &args.target)?;
    ensure_out_dir(&args.io.out_dir)?;
    write_config(
        &args.io.out_dir,
        "profile",
        &[
            ("input", args.input.display().to_string()),
            ("target", args.target.clone()),
            ("seed", args.io.seed.to_string()),
            ("out_dir", args.io.out_dir.display().to_string()),
        ],
    )?;
    let mut csv = String::from("key,value\n");
    for (scale, count) in profile.per_scale_counts.iter().enumerate() {
        csv.push_str(&format!("scale_{},{}\n", scale + 1, count));
    }
    csv.push_str(&format!("dislike_count,{}\n", profile.dislike_count));
    csv.push_str(&format!("favor_count,{}\n", profile.favor_count));
    csv.push_str(&format!("ratio,{}\n", profile.ratio));
    csv.push_str(&format!("minority_class,{}\n", profile.minority_class.name()));
    csv.push_str(&format!("degenerate,{}\n", profile.degenerate));
    emit(
        &args.io.out_dir.join(format!("profile_{}.csv", slug(&args.target))),
        &csv,
    )
}

fn cmd_importance(args: ImportanceArgs) -> Result<(), CliError> {
    let data = load_binarized(&args.input, &args.target, args.threshold)?;
    let ensemble = fit_bagged(&data, args.trees, TreeParams::bagging_default(), args.io.seed)?;
    let curve = oob_error_curve(&ensemble, &data)?;
    let report = permutation_importance(&ensemble, &data, args.io.seed)?;
    ensure_out_dir(&args.io.out_dir)?;
    write_config(
        &args.io.out_dir,
        "importance",
        &[
            ("input", args.input.display().to_string()),
            ("target", args.target.clone()),
            ("threshold", args.threshold.to_string()),
            ("trees", args.trees.to_string()),
            ("seed", args.io.seed.to_string()),
            ("out_dir", args.io.out_dir.display().to_string()),
        ],
    )?;
    let tag = slug(&args.target);
    emit(
        &args.io.out_dir.join(format!("oob_curve_{tag}.csv")),
        &curve_csv(&curve),
    )?;
    emit(
        &args.io.out_dir.join(format!("importance_{tag}.csv")),
        &importance_csv(&report),
    )
}

fn cmd_select(args: SelectArgs) -> Result<(), CliError> {
    let data = load_binarized(&args.input, &args.target, args.threshold)?;
    let ensemble = fit_bagged(&data, args.trees, TreeParams::bagging_default(), args.io.seed)?;
    let report = permutation_importance(&ensemble, &data, args.io.seed)?;
    let selected = select_features(&report, args.importance_threshold);
    ensure_out_dir(&args.io.out_dir)?;
    write_config(
        &args.io.out_dir,
        "select",
        &[
            ("input", args.input.display().to_string()),
            ("target", args.target.clone()),
            ("threshold", args.threshold.to_string()),
            ("trees", args.trees.to_string()),
            ("importance_threshold", args.importance_threshold.to_string()),
            ("seed", args.io.seed.to_string()),
            ("out_dir", args.io.out_dir.display().to_string()),
        ],
    )?;
    let tag = slug(&args.target);
    let mut csv = String::from("feature,score\n");
    for name in &selected {
        let idx = report.feature_names.iter().position(|f| f == name).unwrap();
        csv.push_str(&format!("{},{}\n", name, report.scores[idx]));
    }
    emit(
        &args.io.out_dir.join(format!("selected_features_{tag}.csv")),
        &csv,
    )?;
    // Refit on the reduced set and report its OOB curve, so the whole
    // select-and-regrow workflow lands in one command.
    if !selected.is_empty() {
        let reduced = data.select_features(&selected)?;
        let refit = fit_bagged(&reduced, args.trees, TreeParams::bagging_default(), args.io.seed)?;
        let curve = oob_error_curve(&refit, &reduced)?;
        emit(
            &args.io.out_dir.join(format!("oob_curve_reduced_{tag}.csv")),
            &curve_csv(&curve),
        )?;
    } else {
        println!("no features selected above threshold; skipping refit");
    }
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let cost = parse_cost(&args.cost)?;
    let stop = if args.no_early_stop {
        None
    } else {
        Some(EarlyStopSpec {
            patience: args.patience,
            min_delta: 0.0,
        })
    };
    let spec = parse_algorithm(
        &args.algorithm,
        args.rounds,
        args.trees,
        args.max_depth,
        stop,
        args.svm_c,
    )?;
    let data = load_binarized(&args.input, &args.target, args.threshold)?;
    let model = fit_model(&data, &spec, &cost, args.io.seed)?;
    ensure_out_dir(&args.io.out_dir)?;
    let model_out = args
        .model_out
        .clone()
        .unwrap_or_else(|| args.io.out_dir.join("model.txt"));
    write_config(
        &args.io.out_dir,
        "train",
        &[
            ("input", args.input.display().to_string()),
            ("target", args.target.clone()),
            ("threshold", args.threshold.to_string()),
            ("algorithm", spec.name().to_string()),
            ("cost", cost.tag()),
            ("rounds", args.rounds.to_string()),
            ("trees", args.trees.to_string()),
            ("max_depth", args.max_depth.to_string()),
            ("early_stop", (!args.no_early_stop).to_string()),
            ("patience", args.patience.to_string()),
            ("svm_c", args.svm_c.to_string()),
            ("seed", args.io.seed.to_string()),
            ("model_out", model_out.display().to_string()),
            ("out_dir", args.io.out_dir.display().to_string()),
        ],
    )?;
    model.save(
        &model_out,
        &ModelMeta {
            target: args.target.clone(),
            seed: args.io.seed,
        },
    )?;
    println!("wrote {}", model_out.display());
    Ok(())
}

fn cmd_cost_sweep(args: CostSweepArgs) -> Result<(), CliError> {
    let costs = parse_costs(&args.costs)?;
    let specs = parse_algorithm_list(&args.algorithms, args.rounds, args.trees)?;
    let data = load_binarized(&args.input, &args.target, args.threshold)?;
    let report = cost_sweep(&data, &specs, &costs, args.folds, args.io.seed)?;
    ensure_out_dir(&args.io.out_dir)?;
    write_config(
        &args.io.out_dir,
        "cost-sweep",
        &[
            ("input", args.input.display().to_string()),
            ("target", args.target.clone()),
            ("threshold", args.threshold.to_string()),
            ("algorithms", report.algorithms.join(",")),
            ("costs", args.costs.clone()),
            ("rounds", args.rounds.to_string()),
            ("trees", args.trees.to_string()),
            ("folds", args.folds.to_string()),
            ("seed", args.io.seed.to_string()),
            ("out_dir", args.io.out_dir.display().to_string()),
        ],
    )?;
    for (a, algorithm) in report.algorithms.iter().enumerate() {
        for (c, cost) in report.costs.iter().enumerate() {
            let path = args.io.out_dir.join(format!(
                "confusion_{}_{}.csv",
                slug(algorithm),
                cost_slug(cost)
            ));
            emit(&path, &confusion_csv(&report.cells[a][c]))?;
        }
    }
    emit(
        &args.io.out_dir.join("cost_sweep.csv"),
        &long_csv(&sweep_rows(&args.target, &report)),
    )
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let cost = parse_cost(&args.cost)?;
    let specs = parse_algorithm_list(&args.algorithms, args.rounds, args.trees)?;
    let data = load_binarized(&args.input, &args.target, args.threshold)?;
    let report = compare_algorithms_with(&data, &specs, &cost, args.folds, args.io.seed)?;
    ensure_out_dir(&args.io.out_dir)?;
    write_config(
        &args.io.out_dir,
        "compare",
        &[
            ("input", args.input.display().to_string()),
            ("target", args.target.clone()),
            ("threshold", args.threshold.to_string()),
            ("algorithms", args.algorithms.clone()),
            ("cost", cost.tag()),
            ("rounds", args.rounds.to_string()),
            ("trees", args.trees.to_string()),
            ("folds", args.folds.to_string()),
            ("seed", args.io.seed.to_string()),
            ("out_dir", args.io.out_dir.display().to_string()),
        ],
    )?;
    let rows = comparison_rows(&args.target, &cost, &report);
    emit(&args.io.out_dir.join("compare.csv"), &long_csv(&rows))?;

    let mut headers = vec!["error".to_string()];
    headers.extend(report.entries.iter().map(|(n, _)| n.clone()));
    let table_rows = vec![
        std::iter::once("error_out_sample".to_string())
            .chain(report.entries.iter().map(|(_, cv)| format!("{:.4}", cv.mean_out_sample)))
            .collect::<Vec<_>>(),
        std::iter::once("error_in_sample".to_string())
            .chain(report.entries.iter().map(|(_, cv)| format!("{:.4}", cv.mean_in_sample)))
            .collect::<Vec<_>>(),
    ];
    let table = pretty_table(&headers, &table_rows);
    print!("{table}");
    emit(&args.io.out_dir.join("compare.txt"), &table)
}

fn cmd_metrics(args: MetricsArgs) -> Result<(), CliError> {
    let cost = parse_cost(&args.cost)?;
    let positive = parse_positive_class(&args.positive_class)?;
    let spec = parse_algorithm(
        &args.algorithm,
        args.rounds,
        args.trees,
        3,
        Some(EarlyStopSpec::default()),
        1.0,
    )?;
    let data = load_binarized(&args.input, &args.target, args.threshold)?;
    let report = crossval(&data, &spec, &cost, args.folds, args.io.seed)?;
    let m = metrics(&report.pooled_confusion, positive)?;
    ensure_out_dir(&args.io.out_dir)?;
    write_config(
        &args.io.out_dir,
        "metrics",
        &[
            ("input", args.input.display().to_string()),
            ("target", args.target.clone()),
            ("threshold", args.threshold.to_string()),
            ("algorithm", spec.name().to_string()),
            ("cost", cost.tag()),
            ("rounds", args.rounds.to_string()),
            ("trees", args.trees.to_string()),
            ("folds", args.folds.to_string()),
            ("positive_class", positive.name().to_string()),
            ("seed", args.io.seed.to_string()),
            ("out_dir", args.io.out_dir.display().to_string()),
        ],
    )?;
    let cm = report.pooled_confusion;
    let rows: Vec<ReportRow> = [
        ("precision", m.precision),
        ("recall", m.recall),
        ("accuracy", m.accuracy),
        ("error", m.error),
        ("true_dislike_pred_dislike", cm.count(Label::Dislike, Label::Dislike) as f64),
        ("true_dislike_pred_favor", cm.count(Label::Dislike, Label::Favor) as f64),
        ("true_favor_pred_dislike", cm.count(Label::Favor, Label::Dislike) as f64),
        ("true_favor_pred_favor", cm.count(Label::Favor, Label::Favor) as f64),
    ]
    .into_iter()
    .map(|(metric, value)| ReportRow {
        dataset: args.target.clone(),
        algorithm: spec.name().to_string(),
        cost_tag: cost.tag(),
        metric: format!("{}_{}", metric, positive.name()),
        value,
    })
    .collect();
    emit(
        &args.io.out_dir.join(format!("metrics_{}.csv", slug(&args.target))),
        &long_csv(&rows),
    )
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let informative = parse_indices(&args.informative)?;
    if !(args.favor_fraction > 0.0 && args.favor_fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "--favor-fraction must lie strictly between 0 and 1, got {}",
            args.favor_fraction
        )));
    }
    let table = synth_survey_table(
        args.n,
        args.favor_fraction,
        args.features,
        &informative,
        args.noise,
        args.io.seed,
    )?;
    ensure_out_dir(&args.io.out_dir)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| args.io.out_dir.join("synth.csv"));
    write_config(
        &args.io.out_dir,
        "synth",
        &[
            ("n", args.n.to_string()),
            ("favor_fraction", args.favor_fraction.to_string()),
            ("features", args.features.to_string()),
            ("informative", args.informative.clone()),
            ("noise", args.noise.to_string()),
            ("seed", args.io.seed.to_string()),
            ("out", out.display().to_string()),
            ("out_dir", args.io.out_dir.display().to_string()),
        ],
    )?;
    emit(&out, &table.to_csv_string())
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let (model, _meta) = Model::load(&args.model)?;
    let table = SurveyTable::from_reader(std::fs::File::open(&args.input).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::Run(Error::FileNotFound(args.input.display().to_string()))
        } else {
            CliError::Run(Error::Io(e))
        }
    })?)?;

    // The input must carry every feature the model was trained on.
    let missing: Vec<String> = model
        .feature_names()
        .iter()
        .filter(|f| table.column_index(f).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        let extra: Vec<String> = table
            .column_names()
            .iter()
            .filter(|c| !model.feature_names().contains(c))
            .cloned()
            .collect();
        return Err(CliError::Run(Error::SchemaMismatch {
            missing: missing.join(", "),
            extra: extra.join(", "),
        }));
    }
    let columns: Vec<usize> = model
        .feature_names()
        .iter()
        .map(|f| table.column_index(f).unwrap())
        .collect();

    let mut out = String::new();
    let header: Vec<&str> = table
        .column_names()
        .iter()
        .map(String::as_str)
        .chain(["predicted_label", "score"])
        .collect();
    out.push_str(&join_csv(&header));
    out.push('\n');
    for row in table.rows() {
        let mut fields: Vec<String> = row
            .iter()
            .map(|c| c.map(|v| v.to_string()).unwrap_or_default())
            .collect();
        let complete: Option<Vec<f64>> = columns
            .iter()
            .map(|&c| row[c].map(f64::from))
            .collect();
        match complete {
            Some(features) => {
                let label = model.predict(&features)?;
                let score = model.score(&features)?;
                fields.push(label.name().to_string());
                fields.push(score.to_string());
            }
            None => {
                // Rows with missing model features get empty predictions.
                fields.push(String::new());
                fields.push(String::new());
            }
        }
        let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
        out.push_str(&join_csv(&refs));
        out.push('\n');
    }
    if let Some(parent) = args.output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::Run(Error::Io(e)))?;
        }
    }
    ensure_out_dir(&args.io.out_dir)?;
    write_config(
        &args.io.out_dir,
        "predict",
        &[
            ("model", args.model.display().to_string()),
            ("input", args.input.display().to_string()),
            ("output", args.output.display().to_string()),
            ("seed", args.io.seed.to_string()),
            ("out_dir", args.io.out_dir.display().to_string()),
        ],
    )?;
    emit(&args.output, &out)
}

fn join_csv(fields: &[&str]) -> String {
    fields
        .iter()
        .map(|f| {
            if f.contains(',') || f.contains('"') || f.contains('\n') {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                (*f).to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}
