//! Evaluation: confusion matrices, precision/recall/accuracy, stratified
//! cross-validation, cost-matrix sweeps, and algorithm comparisons.
//!
//! Cross-validated confusion matrices pool the held-out predictions of all
//! folds, so their totals equal the dataset size. Fold work runs in
//! parallel with per-fold derived seeds; reports are deterministic given
//! (data, spec, seed).

use rayon::prelude::*;

use crate::bagging::{fit_bagged_cost, ImportanceReport, OobCurve};
use crate::boosting::{
    fit_adaboost_m1, fit_gentleboost, CostMatrix, EarlyStopSpec,
};
use crate::dataset::{stratified_kfold, BinaryDataset, Label};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::rng::derive_seed;
use crate::svm::fit_linear_svm;
use crate::tree::TreeParams;

/// 2×2 contingency table; rows are the true class, columns the predicted
/// class, both in (dislike, favor) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn new(counts: [[usize; 2]; 2]) -> Self {
        Self { counts }
    }

    pub fn zero() -> Self {
        Self { counts: [[0; 2]; 2] }
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for t in 0..2 {
            for p in 0..2 {
                self.counts[t][p] += other.counts[t][p];
            }
        }
    }

    pub fn count(&self, truth: Label, predicted: Label) -> usize {
        self.counts[truth.index()][predicted.index()]
    }

    pub fn counts(&self) -> [[usize; 2]; 2] {
        self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    /// (dislike, favor) row totals: how many rows of each true class.
    pub fn row_sums(&self) -> (usize, usize) {
        (
            self.counts[0][0] + self.counts[0][1],
            self.counts[1][0] + self.counts[1][1],
        )
    }
}

/// Tabulate predictions against the truth.
pub fn confusion(predictions: &[Label], truth: &[Label]) -> Result<ConfusionMatrix> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch(predictions.len(), truth.len()));
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut cm = ConfusionMatrix::zero();
    for (&p, &t) in predictions.iter().zip(truth) {
        cm.record(t, p);
    }
    Ok(cm)
}

/// Precision/recall/accuracy derived from a confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub error: f64,
    pub positive_class: Label,
    /// Set when a zero denominator forced precision or recall to 0.
    pub degenerate: bool,
}

/// Compute metrics with the given positive class (favor by default in the
/// callers; dislike-positive answers the transposed orientation).
pub fn metrics(cm: &ConfusionMatrix, positive_class: Label) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let pos = positive_class;
    let neg = positive_class.other();
    let tp = cm.count(pos, pos);
    let fp = cm.count(neg, pos);
    let fn_ = cm.count(pos, neg);
    let tn = cm.count(neg, neg);
    let mut degenerate = false;
    let mut ratio = |num: usize, den: usize| {
        if den == 0 {
            degenerate = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let accuracy = (tp + tn) as f64 / total as f64;
    Ok(Metrics {
        precision,
        recall,
        accuracy,
        error: 1.0 - accuracy,
        positive_class,
        degenerate,
    })
}

/// Which learner to train, with its parameters. The cost matrix is supplied
/// separately so sweeps can vary it against a fixed spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearnerSpec {
    AdaBoost {
        rounds: usize,
        weak: TreeParams,
        stop: Option<EarlyStopSpec>,
    },
    GentleBoost {
        rounds: usize,
        weak: TreeParams,
        stop: Option<EarlyStopSpec>,
    },
    Bagging {
        n_trees: usize,
        params: TreeParams,
    },
    Svm {
        c: f64,
        tol: f64,
        max_passes: usize,
    },
    /// Constant majority-class baseline.
    Majority,
}

impl LearnerSpec {
    pub fn adaboost_default() -> Self {
        LearnerSpec::AdaBoost {
            rounds: 200,
            weak: TreeParams::boosting_default(),
            stop: Some(EarlyStopSpec::default()),
        }
    }

    pub fn gentleboost_default() -> Self {
        LearnerSpec::GentleBoost {
            rounds: 200,
            weak: TreeParams::boosting_default(),
            stop: Some(EarlyStopSpec::default()),
        }
    }

    pub fn bagging_default() -> Self {
        LearnerSpec::Bagging {
            n_trees: crate::bagging::DEFAULT_N_TREES,
            params: TreeParams::bagging_default(),
        }
    }

    pub fn svm_default() -> Self {
        LearnerSpec::Svm {
            c: 1.0,
            tol: 1e-3,
            max_passes: 200,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::AdaBoost { .. } => "adaboost-m1",
            LearnerSpec::GentleBoost { .. } => "gentleboost",
            LearnerSpec::Bagging { .. } => "bagging",
            LearnerSpec::Svm { .. } => "linear-svm",
            LearnerSpec::Majority => "majority",
        }
    }
}

/// Train one model according to `spec`.
pub fn fit_model(
    data: &BinaryDataset,
    spec: &LearnerSpec,
    cost: &CostMatrix,
    seed: u64,
) -> Result<Model> {
    Ok(match *spec {
        LearnerSpec::AdaBoost { rounds, weak, stop } => {
            Model::Boosted(fit_adaboost_m1(data, cost, rounds, weak, stop, seed)?)
        }
        LearnerSpec::GentleBoost { rounds, weak, stop } => {
            Model::Boosted(fit_gentleboost(data, cost, rounds, weak, stop, seed)?)
        }
        LearnerSpec::Bagging { n_trees, params } => {
            Model::Bagged(fit_bagged_cost(data, n_trees, params, cost, seed)?)
        }
        LearnerSpec::Svm { c, tol, max_passes } => {
            Model::Svm(fit_linear_svm(data, c, cost, tol, max_passes)?)
        }
        LearnerSpec::Majority => {
            let (dislike, favor) = data.class_counts();
            Model::Majority {
                // Ties go to dislike, like every other decision rule here.
                label: if favor > dislike { Label::Favor } else { Label::Dislike },
                feature_names: data.feature_names().to_vec(),
            }
        }
    })
}

/// Per-fold training and held-out error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldErrors {
    pub in_sample: f64,
    pub out_sample: f64,
}

/// Cross-validation outcome: per-fold errors, their arithmetic means, and
/// the confusion matrix pooled over all held-out predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: Vec<FoldErrors>,
    pub mean_in_sample: f64,
    pub mean_out_sample: f64,
    pub pooled_confusion: ConfusionMatrix,
    /// Held-out error over all rows at once (misclassified ÷ n); equals
    /// 1 − accuracy of the pooled confusion matrix.
    pub pooled_out_error: f64,
}

/// Stratified k-fold cross-validation of one learner.
pub fn crossval(
    data: &BinaryDataset,
    spec: &LearnerSpec,
    cost: &CostMatrix,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    let plan = stratified_kfold(data, k, seed)?;
    let fold_results: Result<Vec<(FoldErrors, ConfusionMatrix, usize)>> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let train_rows = plan.train_rows(fold);
            let test_rows = plan.fold_rows(fold);
            let train = data.subset(&train_rows)?;
            let model = fit_model(&train, spec, cost, derive_seed(seed, fold as u64))?;

            let mut train_wrong = 0usize;
            for i in 0..train.n_rows() {
                if model.predict(train.row(i))? != train.label(i) {
                    train_wrong += 1;
                }
            }
            let mut cm = ConfusionMatrix::zero();
            let mut test_wrong = 0usize;
            for &i in &test_rows {
                let pred = model.predict(data.row(i))?;
                cm.record(data.label(i), pred);
                if pred != data.label(i) {
                    test_wrong += 1;
                }
            }
            Ok((
                FoldErrors {
                    in_sample: train_wrong as f64 / train.n_rows() as f64,
                    out_sample: test_wrong as f64 / test_rows.len() as f64,
                },
                cm,
                test_wrong,
            ))
        })
        .collect();

    let fold_results = fold_results?;
    let folds: Vec<FoldErrors> = fold_results.iter().map(|(f, _, _)| *f).collect();
    let mut pooled = ConfusionMatrix::zero();
    let mut wrong_total = 0usize;
    for (_, cm, wrong) in &fold_results {
        pooled.merge(cm);
        wrong_total += wrong;
    }
    Ok(CvReport {
        mean_in_sample: folds.iter().map(|f| f.in_sample).sum::<f64>() / k as f64,
        mean_out_sample: folds.iter().map(|f| f.out_sample).sum::<f64>() / k as f64,
        folds,
        pooled_confusion: pooled,
        pooled_out_error: wrong_total as f64 / data.n_rows() as f64,
    })
}

/// The cost grid of the experiments: equal costs, then dislike-error
/// penalties of 5 and 2.
pub fn default_sweep_costs() -> Vec<CostMatrix> {
    vec![
        CostMatrix::uniform(),
        CostMatrix::dislike_penalty(5.0).expect("valid"),
        CostMatrix::dislike_penalty(2.0).expect("valid"),
    ]
}

/// Pooled cross-validated confusion matrices over an algorithms × costs
/// grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSweepReport {
    pub algorithms: Vec<String>,
    pub costs: Vec<CostMatrix>,
    /// `cells[a][c]` is the pooled confusion of algorithm `a` at cost `c`.
    pub cells: Vec<Vec<ConfusionMatrix>>,
}

/// Cross-validate every (algorithm, cost) pair.
pub fn cost_sweep(
    data: &BinaryDataset,
    specs: &[LearnerSpec],
    costs: &[CostMatrix],
    k: usize,
    seed: u64,
) -> Result<CostSweepReport> {
    if specs.is_empty() || costs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut cells = Vec::with_capacity(specs.len());
    for spec in specs {
        let mut row = Vec::with_capacity(costs.len());
        for cost in costs {
            row.push(crossval(data, spec, cost, k, seed)?.pooled_confusion);
        }
        cells.push(row);
    }
    Ok(CostSweepReport {
        algorithms: specs.iter().map(|s| s.name().to_string()).collect(),
        costs: costs.to_vec(),
        cells,
    })
}

/// Side-by-side cross-validation of several algorithms under one cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub entries: Vec<(String, CvReport)>,
}

/// Compare AdaBoost.M1, cost-weighted bagging, and the SVM baseline at their
/// default settings.
pub fn compare_algorithms(
    data: &BinaryDataset,
    cost: &CostMatrix,
    k: usize,
    seed: u64,
) -> Result<ComparisonReport> {
    compare_algorithms_with(
        data,
        &[
            LearnerSpec::adaboost_default(),
            LearnerSpec::bagging_default(),
            LearnerSpec::svm_default(),
        ],
        cost,
        k,
        seed,
    )
}

/// Compare an arbitrary set of learners under one cost.
pub fn compare_algorithms_with(
    data: &BinaryDataset,
    specs: &[LearnerSpec],
    cost: &CostMatrix,
    k: usize,
    seed: u64,
) -> Result<ComparisonReport> {
    let mut entries = Vec::with_capacity(specs.len());
    for spec in specs {
        entries.push((spec.name().to_string(), crossval(data, spec, cost, k, seed)?));
    }
    Ok(ComparisonReport { entries })
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

/// One row of the long-format report CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub algorithm: String,
    pub cost_tag: String,
    pub metric: String,
    pub value: f64,
}

/// Header of the long-format report CSV. Stable; documented in FORMATS.md.
pub const LONG_CSV_HEADER: &str = "dataset,algorithm,cost_tag,metric,value";

/// Render rows in the long format `dataset,algorithm,cost_tag,metric,value`.
pub fn long_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(LONG_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.dataset, r.algorithm, r.cost_tag, r.metric, r.value
        ));
    }
    out
}

/// Confusion matrix as a small labeled CSV.
pub fn confusion_csv(cm: &ConfusionMatrix) -> String {
    let c = cm.counts();
    format!(
        "true_class,pred_dislike,pred_favor\ndislike,{},{}\nfavor,{},{}\n",
        c[0][0], c[0][1], c[1][0], c[1][1]
    )
}

/// OOB curve as `index,value`; the index is the ensemble size (1-based).
pub fn curve_csv(curve: &OobCurve) -> String {
    let mut out = String::from("index,value\n");
    for (t, v) in curve.values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", t + 1, v));
    }
    out
}

/// Importance report as `feature,score`, in feature order.
pub fn importance_csv(report: &ImportanceReport) -> String {
    let mut out = String::from("feature,score\n");
    for (name, score) in report.feature_names.iter().zip(&report.scores) {
        out.push_str(&crate::dataset::csv_field(name));
        out.push_str(&format!(",{score}\n"));
    }
    out
}

/// Rows for a comparison report: out-of-sample and in-sample error per
/// algorithm.
pub fn comparison_rows(
    dataset: &str,
    cost: &CostMatrix,
    report: &ComparisonReport,
) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for (name, cv) in &report.entries {
        rows.push(ReportRow {
            dataset: dataset.to_string(),
            algorithm: name.clone(),
            cost_tag: cost.tag(),
            metric: "error_out_sample".into(),
            value: cv.mean_out_sample,
        });
        rows.push(ReportRow {
            dataset: dataset.to_string(),
            algorithm: name.clone(),
            cost_tag: cost.tag(),
            metric: "error_in_sample".into(),
            value: cv.mean_in_sample,
        });
    }
    rows
}

/// Rows for a cost sweep: the four confusion counts per (algorithm, cost).
pub fn sweep_rows(dataset: &str, report: &CostSweepReport) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for (a, algorithm) in report.algorithms.iter().enumerate() {
        for (c, cost) in report.costs.iter().enumerate() {
            let cm = &report.cells[a][c];
            let named = [
                ("true_dislike_pred_dislike", cm.count(Label::Dislike, Label::Dislike)),
                ("true_dislike_pred_favor", cm.count(Label::Dislike, Label::Favor)),
                ("true_favor_pred_dislike", cm.count(Label::Favor, Label::Dislike)),
                ("true_favor_pred_favor", cm.count(Label::Favor, Label::Favor)),
            ];
            for (metric, value) in named {
                rows.push(ReportRow {
                    dataset: dataset.to_string(),
                    algorithm: algorithm.clone(),
                    cost_tag: cost.tag(),
                    metric: metric.into(),
                    value: value as f64,
                });
            }
        }
    }
    rows
}

/// Plain-text table with left-aligned, padded columns.
pub fn pretty_table(headers: &[String], rows: &[Vec<String>]) -> String {
    let n_cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(String::len).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(n_cols) {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let render = |cells: &[String]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = render(headers);
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (n_cols - 1)));
    out.push('\n');
    for row in rows {
        out.push_str(&render(row));
        out.push('\n');
    }
    out
}
