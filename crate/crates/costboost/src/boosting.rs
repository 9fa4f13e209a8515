//! Cost-sensitive boosting: AdaBoost.M1 and GentleBoost.
//!
//! Misclassification costs enter the learners once, through the initial
//! observation weights — adjusting a two-class prior and scaling the cost
//! matrix by a positive constant are equivalent, so training is invariant
//! under that scaling. The per-round updates themselves are cost-free.
//!
//! AdaBoost.M1 fits a ±1 classification tree each round, weighs it by
//! `α = ½·ln((1−ε)/ε)`, and reweights observations by `exp(−α·y·k(x))`.
//! GentleBoost instead fits a weighted regression tree to the ±1 targets
//! and adds its bounded output directly to the score.

use crate::dataset::{stratified_kfold, BinaryDataset, Label};
use crate::error::{Error, Result};
use crate::tree::{fit_classification_tree, fit_regression_tree, Tree, TreeParams};

/// Weighted errors are clamped to this range before computing α, so perfect
/// weak learners stay finite.
pub const EPS_CLAMP: f64 = 1e-10;

/// 2×2 misclassification cost table, indexed (true class, predicted class)
/// in (dislike, favor) order. The diagonal is zero; off-diagonal entries are
/// nonnegative with at least one positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostMatrix {
    c: [[f64; 2]; 2],
}

impl CostMatrix {
    /// Validate and build a cost matrix from row-major entries.
    pub fn new(c: [[f64; 2]; 2]) -> Result<Self> {
        for row in &c {
            for &v in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidCostMatrix(format!(
                        "entries must be finite and nonnegative, got {v}"
                    )));
                }
            }
        }
        if c[0][0] != 0.0 || c[1][1] != 0.0 {
            return Err(Error::InvalidCostMatrix(
                "diagonal elements must be exactly 0".into(),
            ));
        }
        if c[0][1] == 0.0 && c[1][0] == 0.0 {
            return Err(Error::InvalidCostMatrix(
                "at least one off-diagonal element must be positive".into(),
            ));
        }
        Ok(Self { c })
    }

    /// Equal misclassification costs: [[0, 1], [1, 0]].
    pub fn uniform() -> Self {
        Self {
            c: [[0.0, 1.0], [1.0, 0.0]],
        }
    }

    /// The [[0, t], [1, 0]] family: misclassifying a true dislike as favor
    /// costs `t` times the opposite mistake.
    pub fn dislike_penalty(t: f64) -> Result<Self> {
        Self::new([[0.0, t], [1.0, 0.0]])
    }

    /// Cost of predicting `predicted` when the truth is `truth`.
    pub fn cost(&self, truth: Label, predicted: Label) -> f64 {
        self.c[truth.index()][predicted.index()]
    }

    /// Row-major entries.
    pub fn entries(&self) -> [f64; 4] {
        [self.c[0][0], self.c[0][1], self.c[1][0], self.c[1][1]]
    }

    /// Every entry multiplied by a positive constant.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidCostMatrix(format!(
                "scale must be positive and finite, got {s}"
            )));
        }
        Self::new([
            [self.c[0][0] * s, self.c[0][1] * s],
            [self.c[1][0] * s, self.c[1][1] * s],
        ])
    }

    /// Short tag used in report files: row-major entries joined by '|'.
    pub fn tag(&self) -> String {
        let e = self.entries();
        format!("{}|{}|{}|{}", e[0], e[1], e[2], e[3])
    }
}

/// Initial observation weights: each row weighted by the cost of
/// misclassifying it, normalized to sum 1. Uniform costs give uniform
/// weights.
pub fn init_weights(data: &BinaryDataset, cost: &CostMatrix) -> Result<Vec<f64>> {
    let (dislike, favor) = data.class_counts();
    if dislike == 0 || favor == 0 {
        return Err(Error::SingleClassData);
    }
    let raw: Vec<f64> = data
        .labels()
        .iter()
        .map(|&y| cost.cost(y, y.other()))
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidCostMatrix(
            "cost assigns zero weight to every row".into(),
        ));
    }
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Weighted error rate: the weight fraction of rows whose prediction
/// disagrees with the label.
pub fn round_error(weights: &[f64], predictions: &[Label], labels: &[Label]) -> Result<f64> {
    if weights.len() != predictions.len() {
        return Err(Error::LengthMismatch(weights.len(), predictions.len()));
    }
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch(predictions.len(), labels.len()));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::AllWeightsZero);
    }
    let wrong: f64 = weights
        .iter()
        .zip(predictions.iter().zip(labels.iter()))
        .filter(|(_, (p, y))| p != y)
        .map(|(w, _)| w)
        .sum();
    Ok(wrong / total)
}

/// Round weight `α = ½·ln((1−ε)/ε)` on the clamped error.
pub fn alpha(eps: f64) -> f64 {
    let e = eps.clamp(EPS_CLAMP, 1.0 - EPS_CLAMP);
    0.5 * ((1.0 - e) / e).ln()
}

/// Early-stopping policy: patience rounds without an improvement larger
/// than `min_delta` ends training, truncated to the best round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyStopSpec {
    pub patience: usize,
    pub min_delta: f64,
}

impl Default for EarlyStopSpec {
    fn default() -> Self {
        Self {
            patience: 20,
            min_delta: 0.0,
        }
    }
}

/// Outcome of an early-stopping check over a validation-loss history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EarlyStopDecision {
    Continue,
    /// Stop, keeping the first `best_rounds` rounds (1-based count).
    StopAtBest { best_rounds: usize },
}

/// Walk a per-round validation-loss history and decide whether to stop.
pub fn early_stop_check(history: &[f64], spec: &EarlyStopSpec) -> EarlyStopDecision {
    if history.is_empty() {
        return EarlyStopDecision::Continue;
    }
    let mut best = history[0];
    let mut best_round = 0usize;
    let mut stale = 0usize;
    for (i, &loss) in history.iter().enumerate().skip(1) {
        if best - loss > spec.min_delta {
            best = loss;
            best_round = i;
            stale = 0;
        } else {
            stale += 1;
            if stale >= spec.patience {
                return EarlyStopDecision::StopAtBest {
                    best_rounds: best_round + 1,
                };
            }
        }
    }
    EarlyStopDecision::Continue
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoostAlgorithm {
    AdaBoostM1,
    GentleBoost,
}

impl BoostAlgorithm {
    pub fn name(self) -> &'static str {
        match self {
            BoostAlgorithm::AdaBoostM1 => "adaboost-m1",
            BoostAlgorithm::GentleBoost => "gentleboost",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "adaboost-m1" => Some(Self::AdaBoostM1),
            "gentleboost" => Some(Self::GentleBoost),
            _ => None,
        }
    }
}

/// Per-round audit record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    /// Weighted error of the round's learner under the weights it saw.
    pub eps: f64,
    /// Learner coefficient (always 1 for GentleBoost).
    pub alpha: f64,
}

/// A trained boosted ensemble: weak learners with coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedEnsemble {
    weak_learners: Vec<Tree>,
    alphas: Vec<f64>,
    history: Vec<RoundRecord>,
    algorithm: BoostAlgorithm,
    cost: CostMatrix,
    feature_names: Vec<String>,
}

impl BoostedEnsemble {
    pub fn from_parts(
        weak_learners: Vec<Tree>,
        alphas: Vec<f64>,
        history: Vec<RoundRecord>,
        algorithm: BoostAlgorithm,
        cost: CostMatrix,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if weak_learners.len() != alphas.len() || weak_learners.len() != history.len() {
            return Err(Error::LengthMismatch(weak_learners.len(), alphas.len()));
        }
        let d = feature_names.len();
        if let Some(t) = weak_learners.iter().find(|t| t.n_features() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: t.n_features(),
            });
        }
        Ok(Self {
            weak_learners,
            alphas,
            history,
            algorithm,
            cost,
            feature_names,
        })
    }

    pub fn rounds_used(&self) -> usize {
        self.weak_learners.len()
    }

    pub fn weak_learners(&self) -> &[Tree] {
        &self.weak_learners
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn history(&self) -> &[RoundRecord] {
        &self.history
    }

    pub fn algorithm(&self) -> BoostAlgorithm {
        self.algorithm
    }

    pub fn cost(&self) -> &CostMatrix {
        &self.cost
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Raw additive score `Σ αₘ·kₘ(x)`.
    pub fn score(&self, row: &[f64]) -> Result<f64> {
        if self.weak_learners.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if row.len() != self.feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_names.len(),
                got: row.len(),
            });
        }
        Ok(self
            .weak_learners
            .iter()
            .zip(&self.alphas)
            .map(|(t, a)| a * t.predict_unchecked(row))
            .sum())
    }

    /// Predicted label: the sign of the score, ties toward dislike.
    pub fn predict(&self, row: &[f64]) -> Result<Label> {
        Ok(Label::from_score(self.score(row)?))
    }
}

/// Fit AdaBoost.M1 with cost-initialized weights.
///
/// Training stops at the round limit, when a round's weighted error reaches
/// 0.5 (that round is discarded), when a round is essentially perfect
/// (kept, with clamped α), or when early stopping fires on an internal
/// stratified 20% validation slice.
pub fn fit_adaboost_m1(
    data: &BinaryDataset,
    cost: &CostMatrix,
    max_rounds: usize,
    weak_params: TreeParams,
    stop: Option<EarlyStopSpec>,
    seed: u64,
) -> Result<BoostedEnsemble> {
    fit_boosted(data, cost, max_rounds, weak_params, stop, seed, BoostAlgorithm::AdaBoostM1)
}

/// Fit GentleBoost: weighted regression trees on the ±1 targets, weights
/// updated by `exp(−y·f(x))`, unit coefficients.
pub fn fit_gentleboost(
    data: &BinaryDataset,
    cost: &CostMatrix,
    max_rounds: usize,
    weak_params: TreeParams,
    stop: Option<EarlyStopSpec>,
    seed: u64,
) -> Result<BoostedEnsemble> {
    fit_boosted(data, cost, max_rounds, weak_params, stop, seed, BoostAlgorithm::GentleBoost)
}

fn fit_boosted(
    data: &BinaryDataset,
    cost: &CostMatrix,
    max_rounds: usize,
    weak_params: TreeParams,
    stop: Option<EarlyStopSpec>,
    seed: u64,
    algorithm: BoostAlgorithm,
) -> Result<BoostedEnsemble> {
    if max_rounds < 1 {
        return Err(Error::InvalidInput("max_rounds must be at least 1".into()));
    }

    // With early stopping enabled, a stratified 20% slice is held out for
    // monitoring and the rounds train on the remainder.
    let mut carved: Option<(BinaryDataset, BinaryDataset)> = None;
    if stop.is_some() {
        let plan = stratified_kfold(data, 5, seed)?;
        carved = Some((
            data.subset(&plan.train_rows(0))?,
            data.subset(&plan.fold_rows(0))?,
        ));
    }
    let (train, holdout): (&BinaryDataset, Option<&BinaryDataset>) = match &carved {
        Some((t, h)) => (t, Some(h)),
        None => (data, None),
    };

    let labels = train.labels().to_vec();
    let signs: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let mut weights = init_weights(train, cost)?;

    let mut learners: Vec<Tree> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut history: Vec<RoundRecord> = Vec::new();
    let mut val_losses: Vec<f64> = Vec::new();
    let mut val_scores: Vec<f64> = holdout
        .as_ref()
        .map(|h| vec![0.0; h.n_rows()])
        .unwrap_or_default();

    for _ in 0..max_rounds {
        let (tree, coeff, eps, done) = match algorithm {
            BoostAlgorithm::AdaBoostM1 => {
                let tree = fit_classification_tree(train, &weights, weak_params)?;
                let predictions: Vec<Label> = (0..train.n_rows())
                    .map(|i| Label::from_score(tree.predict_unchecked(train.row(i))))
                    .collect();
                let eps = round_error(&weights, &predictions, &labels)?;
                if eps >= 0.5 {
                    // A learner no better than chance would get α ≤ 0 and
                    // invert; discard the round and stop.
                    break;
                }
                let a = alpha(eps);
                (tree, a, eps, eps <= EPS_CLAMP)
            }
            BoostAlgorithm::GentleBoost => {
                let tree = fit_regression_tree(train, &signs, &weights, weak_params)?;
                let predictions: Vec<Label> = (0..train.n_rows())
                    .map(|i| Label::from_score(tree.predict_unchecked(train.row(i))))
                    .collect();
                let eps = round_error(&weights, &predictions, &labels)?;
                // A constant-zero learner makes no further progress.
                let stalled = tree.nodes().len() == 1
                    && tree.predict_unchecked(train.row(0)).abs() <= 1e-12;
                (tree, 1.0, eps, stalled)
            }
        };

        // ω_i ← ω_i · exp(−coeff · y_i · f(x_i)), renormalized.
        let mut sum = 0.0;
        for i in 0..train.n_rows() {
            let f = tree.predict_unchecked(train.row(i));
            weights[i] *= (-coeff * signs[i] * f).exp();
            sum += weights[i];
        }
        for w in weights.iter_mut() {
            *w /= sum;
        }

        learners.push(tree);
        alphas.push(coeff);
        history.push(RoundRecord { eps, alpha: coeff });

        if done {
            break;
        }

        if let (Some(spec), Some(holdout)) = (stop.as_ref(), holdout.as_ref()) {
            let tree = learners.last().unwrap();
            let mut wrong = 0usize;
            for (i, score) in val_scores.iter_mut().enumerate() {
                *score += coeff * tree.predict_unchecked(holdout.row(i));
                if Label::from_score(*score) != holdout.label(i) {
                    wrong += 1;
                }
            }
            val_losses.push(wrong as f64 / holdout.n_rows() as f64);
            if let EarlyStopDecision::StopAtBest { best_rounds } =
                early_stop_check(&val_losses, spec)
            {
                learners.truncate(best_rounds);
                alphas.truncate(best_rounds);
                history.truncate(best_rounds);
                break;
            }
        }
    }

    BoostedEnsemble::from_parts(
        learners,
        alphas,
        history,
        algorithm,
        *cost,
        data.feature_names().to_vec(),
    )
}
