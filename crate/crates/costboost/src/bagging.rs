//! Bootstrap-aggregated classification trees.
//!
//! Each tree trains on `n` draws with replacement from the training rows;
//! the rows a tree never saw are its out-of-bag (OOB) set and provide a
//! built-in validation sample. The module exposes the OOB error curve as
//! trees accumulate, per-feature permutation importance, and the
//! threshold-based feature selection built on top of it.
//!
//! Per-tree RNG streams are derived from the ensemble seed, so fitting and
//! scoring are bit-identical whether trees are processed in parallel or
//! sequentially. Misclassification costs, when supplied, reweight the
//! bootstrap sampling distribution through the same cost-to-weights
//! transform the boosting module uses for its initial weights.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::boosting::{init_weights, CostMatrix};
use crate::dataset::{BinaryDataset, Label};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::tree::{fit_classification_tree, Tree, TreeKind, TreeParams};

/// Ensemble size used throughout the experiments.
pub const DEFAULT_N_TREES: usize = 400;

/// Importance threshold for feature selection.
pub const DEFAULT_IMPORTANCE_THRESHOLD: f64 = 0.1;

/// A fitted bagged ensemble with its per-tree in-bag masks.
#[derive(Debug, Clone, PartialEq)]
pub struct BaggedEnsemble {
    trees: Vec<Tree>,
    in_bag: Vec<Vec<bool>>,
    feature_names: Vec<String>,
    seed: u64,
}

impl BaggedEnsemble {
    pub fn from_parts(
        trees: Vec<Tree>,
        in_bag: Vec<Vec<bool>>,
        feature_names: Vec<String>,
        seed: u64,
    ) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if trees.len() != in_bag.len() {
            return Err(Error::LengthMismatch(trees.len(), in_bag.len()));
        }
        let n = in_bag[0].len();
        if in_bag.iter().any(|m| m.len() != n) {
            return Err(Error::MaskMismatch {
                mask_rows: n,
                data_rows: 0,
            });
        }
        for tree in &trees {
            if tree.n_features() != feature_names.len() {
                return Err(Error::DimensionMismatch {
                    expected: feature_names.len(),
                    got: tree.n_features(),
                });
            }
            if tree.kind() != TreeKind::Classification {
                return Err(Error::InvalidInput(
                    "bagged ensembles hold classification trees".into(),
                ));
            }
        }
        Ok(Self {
            trees,
            in_bag,
            feature_names,
            seed,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// In-bag mask of tree `t` over the training rows.
    pub fn in_bag(&self, t: usize) -> &[bool] {
        &self.in_bag[t]
    }

    pub fn in_bag_masks(&self) -> &[Vec<bool>] {
        &self.in_bag
    }

    /// Number of training rows the masks cover.
    pub fn n_training_rows(&self) -> usize {
        self.in_bag[0].len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Mean vote in [−1, 1]: the fraction of favor votes minus dislike votes.
    pub fn score(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_names.len(),
                got: row.len(),
            });
        }
        let sum: f64 = self.trees.iter().map(|t| t.predict_unchecked(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }

    /// Plurality vote over the trees; an exact tie predicts dislike.
    pub fn predict(&self, row: &[f64]) -> Result<Label> {
        Ok(Label::from_score(self.score(row)?))
    }

    /// Fraction of training rows left out of tree `t`'s bootstrap sample.
    pub fn oob_fraction(&self, t: usize) -> f64 {
        let oob = self.in_bag[t].iter().filter(|&&b| !b).count();
        oob as f64 / self.in_bag[t].len() as f64
    }
}

/// Fit a bagged ensemble with uniform bootstrap sampling.
pub fn fit_bagged(
    data: &BinaryDataset,
    n_trees: usize,
    params: TreeParams,
    seed: u64,
) -> Result<BaggedEnsemble> {
    fit_bagged_sampled(data, n_trees, params, &vec![1.0; data.n_rows()], seed)
}

/// Fit a bagged ensemble whose bootstrap draws follow the cost-adjusted
/// weight distribution, making high-cost rows proportionally more likely to
/// enter each tree's sample.
pub fn fit_bagged_cost(
    data: &BinaryDataset,
    n_trees: usize,
    params: TreeParams,
    cost: &CostMatrix,
    seed: u64,
) -> Result<BaggedEnsemble> {
    let weights = init_weights(data, cost)?;
    fit_bagged_sampled(data, n_trees, params, &weights, seed)
}

fn fit_bagged_sampled(
    data: &BinaryDataset,
    n_trees: usize,
    params: TreeParams,
    sampling_weights: &[f64],
    seed: u64,
) -> Result<BaggedEnsemble> {
    let n = data.n_rows();
    if n < 2 {
        return Err(Error::EmptyDataset("bagging needs at least 2 rows".into()));
    }
    if n_trees < 1 {
        return Err(Error::InvalidInput("n_trees must be at least 1".into()));
    }
    let dist = WeightedIndex::new(sampling_weights)
        .map_err(|e| Error::InvalidWeights(e.to_string()))?;

    let fitted: Result<Vec<(Tree, Vec<bool>)>> = (0..n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let mut draw_counts = vec![0.0f64; n];
            let mut mask = vec![false; n];
            for _ in 0..n {
                let i = dist.sample(&mut rng);
                draw_counts[i] += 1.0;
                mask[i] = true;
            }
            let tree = fit_classification_tree(data, &draw_counts, params)?;
            Ok((tree, mask))
        })
        .collect();

    let (trees, in_bag) = fitted?.into_iter().unzip();
    BaggedEnsemble::from_parts(trees, in_bag, data.feature_names().to_vec(), seed)
}

/// OOB misclassification error as a function of ensemble size.
///
/// Entry `t` (0-based; ensemble size t+1) is the error of the plurality
/// vote over the first t+1 trees, counting each row only on trees where it
/// was out of bag. Rows with no OOB vote yet drop out of the denominator;
/// if no row has a vote the entry is 0 and flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct OobCurve {
    pub values: Vec<f64>,
    pub all_in_bag: Vec<bool>,
}

impl OobCurve {
    /// Error using the full ensemble.
    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("curve is never empty")
    }
}

/// Compute the OOB error curve of `ensemble` against its training data.
pub fn oob_error_curve(ensemble: &BaggedEnsemble, data: &BinaryDataset) -> Result<OobCurve> {
    check_alignment(ensemble, data)?;
    let n = data.n_rows();

    // Per-tree OOB predictions, computed in parallel; the running vote is
    // accumulated sequentially in tree order.
    let per_tree: Vec<Vec<(usize, Label)>> = ensemble
        .trees
        .par_iter()
        .zip(&ensemble.in_bag)
        .map(|(tree, mask)| {
            (0..n)
                .filter(|&i| !mask[i])
                .map(|i| (i, Label::from_score(tree.predict_unchecked(data.row(i)))))
                .collect()
        })
        .collect();

    let mut favor_votes = vec![0i64; n];
    let mut total_votes = vec![0i64; n];
    let mut values = Vec::with_capacity(ensemble.n_trees());
    let mut all_in_bag = Vec::with_capacity(ensemble.n_trees());
    for votes in &per_tree {
        for &(i, label) in votes {
            total_votes[i] += 1;
            if label == Label::Favor {
                favor_votes[i] += 1;
            }
        }
        let mut evaluated = 0usize;
        let mut wrong = 0usize;
        for i in 0..n {
            if total_votes[i] == 0 {
                continue;
            }
            evaluated += 1;
            // Plurality with ties toward dislike.
            let pred = if 2 * favor_votes[i] > total_votes[i] {
                Label::Favor
            } else {
                Label::Dislike
            };
            if pred != data.label(i) {
                wrong += 1;
            }
        }
        if evaluated == 0 {
            values.push(0.0);
            all_in_bag.push(true);
        } else {
            values.push(wrong as f64 / evaluated as f64);
            all_in_bag.push(false);
        }
    }
    Ok(OobCurve { values, all_in_bag })
}

/// Per-feature permutation importance scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceReport {
    pub feature_names: Vec<String>,
    pub scores: Vec<f64>,
    pub method: String,
    pub threshold_used: f64,
}

/// Permutation importance over the ensemble's OOB samples.
///
/// For each tree, the error on its OOB rows is compared against the error
/// after shuffling one feature's values across those rows; the per-feature
/// score is the mean of that error increase over trees divided by its
/// standard deviation. Features whose permutation changes nothing score 0.
pub fn permutation_importance(
    ensemble: &BaggedEnsemble,
    data: &BinaryDataset,
    seed: u64,
) -> Result<ImportanceReport> {
    check_alignment(ensemble, data)?;
    let n = data.n_rows();
    let d = data.n_features();

    let deltas: Vec<Option<Vec<f64>>> = ensemble
        .trees
        .par_iter()
        .zip(&ensemble.in_bag)
        .enumerate()
        .map(|(t, (tree, mask))| {
            let oob: Vec<usize> = (0..n).filter(|&i| !mask[i]).collect();
            if oob.is_empty() {
                return None;
            }
            let base_wrong = oob
                .iter()
                .filter(|&&i| {
                    Label::from_score(tree.predict_unchecked(data.row(i))) != data.label(i)
                })
                .count();
            let base_err = base_wrong as f64 / oob.len() as f64;

            let mut rng = stream_rng(seed, t as u64);
            let mut row_buf = vec![0.0f64; d];
            let mut perm: Vec<usize> = (0..oob.len()).collect();
            let mut tree_deltas = Vec::with_capacity(d);
            for j in 0..d {
                perm.shuffle(&mut rng);
                let mut wrong = 0usize;
                for (p, &i) in oob.iter().enumerate() {
                    row_buf.copy_from_slice(data.row(i));
                    row_buf[j] = data.value(oob[perm[p]], j);
                    if Label::from_score(tree.predict_unchecked(&row_buf)) != data.label(i) {
                        wrong += 1;
                    }
                }
                tree_deltas.push(wrong as f64 / oob.len() as f64 - base_err);
            }
            Some(tree_deltas)
        })
        .collect();

    let valid: Vec<&Vec<f64>> = deltas.iter().flatten().collect();
    let mut scores = vec![0.0f64; d];
    if valid.len() >= 2 {
        for (j, score) in scores.iter_mut().enumerate() {
            let m = valid.len() as f64;
            let mean = valid.iter().map(|v| v[j]).sum::<f64>() / m;
            let var = valid.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>() / (m - 1.0);
            let std = var.sqrt();
            *score = if std > 0.0 { mean / std } else { 0.0 };
        }
    }
    Ok(ImportanceReport {
        feature_names: data.feature_names().to_vec(),
        scores,
        method: "oob-permutation".to_string(),
        threshold_used: DEFAULT_IMPORTANCE_THRESHOLD,
    })
}

/// Names of the features scoring strictly above `threshold`, in feature
/// order. An empty selection is legal.
pub fn select_features(report: &ImportanceReport, threshold: f64) -> Vec<String> {
    report
        .feature_names
        .iter()
        .zip(&report.scores)
        .filter(|(_, &s)| s > threshold)
        .map(|(name, _)| name.clone())
        .collect()
}

fn check_alignment(ensemble: &BaggedEnsemble, data: &BinaryDataset) -> Result<()> {
    if ensemble.n_training_rows() != data.n_rows() {
        return Err(Error::MaskMismatch {
            mask_rows: ensemble.n_training_rows(),
            data_rows: data.n_rows(),
        });
    }
    if data.n_features() != ensemble.feature_names.len() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.feature_names.len(),
            got: data.n_features(),
        });
    }
    Ok(())
}
