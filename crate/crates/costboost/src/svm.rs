//! Linear soft-margin SVM baseline.
//!
//! The dual problem is solved by pairwise coordinate optimization over the
//! Lagrange multipliers, with per-class box constraints carrying the
//! misclassification costs: the dislike-class box is scaled by the cost
//! ratio c(dislike→favor) / c(favor→dislike), so costly-to-misclassify rows
//! may push harder on the margin. Features are standardized internally;
//! constant features standardize to 0. No randomness is involved, so
//! fitting is fully deterministic.

use crate::boosting::CostMatrix;
use crate::dataset::{BinaryDataset, Label};
use crate::error::{Error, Result};

/// Cost ratios are clamped to this range when forming the class boxes.
const RATIO_CLAMP: f64 = 1e6;

/// Minimum multiplier change that counts as progress.
const ALPHA_TOL: f64 = 1e-10;

/// A fitted linear SVM with its standardization parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    weight_vector: Vec<f64>,
    bias: f64,
    feature_means: Vec<f64>,
    feature_stds: Vec<f64>,
    c_pos: f64,
    c_neg: f64,
    training_kkt_residual: f64,
    converged: bool,
    dual_objective: f64,
    alphas: Vec<f64>,
    feature_names: Vec<String>,
}

impl SvmModel {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        weight_vector: Vec<f64>,
        bias: f64,
        feature_means: Vec<f64>,
        feature_stds: Vec<f64>,
        c_pos: f64,
        c_neg: f64,
        training_kkt_residual: f64,
        converged: bool,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let d = feature_names.len();
        if weight_vector.len() != d || feature_means.len() != d || feature_stds.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: weight_vector.len(),
            });
        }
        if !(c_pos > 0.0 && c_neg > 0.0) {
            return Err(Error::InvalidInput("box constraints must be positive".into()));
        }
        if weight_vector.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput("non-finite weight vector".into()));
        }
        Ok(Self {
            weight_vector,
            bias,
            feature_means,
            feature_stds,
            c_pos,
            c_neg,
            training_kkt_residual,
            converged,
            dual_objective: 0.0,
            alphas: Vec::new(),
            feature_names,
        })
    }

    pub fn weight_vector(&self) -> &[f64] {
        &self.weight_vector
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn feature_means(&self) -> &[f64] {
        &self.feature_means
    }

    pub fn feature_stds(&self) -> &[f64] {
        &self.feature_stds
    }

    pub fn c_pos(&self) -> f64 {
        self.c_pos
    }

    pub fn c_neg(&self) -> f64 {
        self.c_neg
    }

    pub fn training_kkt_residual(&self) -> f64 {
        self.training_kkt_residual
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Final dual objective Σα − ½‖w‖².
    pub fn dual_objective(&self) -> f64 {
        self.dual_objective
    }

    /// Dual variables, in training-row order. Empty on reloaded models.
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Signed distance proxy `w·z + b` in standardized feature space.
    pub fn decision_value(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_names.len(),
                got: row.len(),
            });
        }
        let mut acc = self.bias;
        for (j, &x) in row.iter().enumerate() {
            let z = if self.feature_stds[j] > 0.0 {
                (x - self.feature_means[j]) / self.feature_stds[j]
            } else {
                0.0
            };
            acc += self.weight_vector[j] * z;
        }
        Ok(acc)
    }

    /// Predicted label: sign of the decision value, ties toward dislike.
    pub fn predict(&self, row: &[f64]) -> Result<Label> {
        Ok(Label::from_score(self.decision_value(row)?))
    }
}

/// Fit a linear soft-margin SVM.
///
/// `c` is the favor-class box constraint; the dislike-class box is `c`
/// scaled by the cost ratio. Optimization runs until the largest KKT
/// violation drops below `tol` or `max_passes` full passes complete; in the
/// latter case the model is still returned with `converged() == false` and
/// the residual recorded.
pub fn fit_linear_svm(
    data: &BinaryDataset,
    c: f64,
    cost: &CostMatrix,
    tol: f64,
    max_passes: usize,
) -> Result<SvmModel> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("c must be positive, got {c}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    let (n_dislike, n_favor) = data.class_counts();
    if n_dislike == 0 || n_favor == 0 {
        return Err(Error::SingleClassData);
    }

    let n = data.n_rows();
    let d = data.n_features();

    // Standardize features; constant columns map to 0.
    let mut means = vec![0.0f64; d];
    let mut stds = vec![0.0f64; d];
    for j in 0..d {
        let mean = (0..n).map(|i| data.value(i, j)).sum::<f64>() / n as f64;
        let var = (0..n).map(|i| (data.value(i, j) - mean).powi(2)).sum::<f64>() / n as f64;
        means[j] = mean;
        stds[j] = var.sqrt();
    }
    let z: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if stds[j] > 0.0 {
                        (data.value(i, j) - means[j]) / stds[j]
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let y: Vec<f64> = data.labels().iter().map(|l| l.sign()).collect();

    let cdf = cost.cost(Label::Dislike, Label::Favor);
    let cfd = cost.cost(Label::Favor, Label::Dislike);
    let ratio = if cfd > 0.0 { cdf / cfd } else { RATIO_CLAMP };
    let c_pos = c;
    let c_neg = c * ratio.clamp(1.0 / RATIO_CLAMP, RATIO_CLAMP);
    let box_of = |i: usize| if y[i] > 0.0 { c_pos } else { c_neg };

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, w)| x * w).sum::<f64>();

    let mut alphas = vec![0.0f64; n];
    let mut w = vec![0.0f64; d];
    let mut b = 0.0f64;

    let kkt_violation = |alphas: &[f64], w: &[f64], b: f64| -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let r = y[i] * (dot(w, &z[i]) + b) - 1.0;
            let ci = box_of(i);
            let edge = 1e-9 * ci;
            let v = if alphas[i] <= edge {
                (-r).max(0.0)
            } else if alphas[i] >= ci - edge {
                r.max(0.0)
            } else {
                r.abs()
            };
            worst = worst.max(v);
        }
        worst
    };

    for _pass in 0..max_passes {
        for i in 0..n {
            let e_i = dot(&w, &z[i]) + b - y[i];
            let r_i = y[i] * e_i;
            let ci = box_of(i);
            let violates = (r_i < -tol && alphas[i] < ci) || (r_i > tol && alphas[i] > 0.0);
            if !violates {
                continue;
            }
            // Second choice: the row with the largest |E_i − E_j| first,
            // then a deterministic sweep as fallback.
            let mut best_j = None;
            let mut best_gap = -1.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let e_j = dot(&w, &z[j]) + b - y[j];
                let gap = (e_i - e_j).abs();
                if gap > best_gap {
                    best_gap = gap;
                    best_j = Some(j);
                }
            }
            let mut advanced = false;
            if let Some(j) = best_j {
                advanced = optimize_pair(
                    i, j, &z, &y, &mut alphas, &mut w, &mut b, &box_of, &dot,
                );
            }
            if !advanced {
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    if optimize_pair(i, j, &z, &y, &mut alphas, &mut w, &mut b, &box_of, &dot) {
                        break;
                    }
                }
            }
        }
        if kkt_violation(&alphas, &w, b) < tol {
            break;
        }
    }

    // Rebuild w from the multipliers to shed incremental drift, and center b
    // on the margin support vectors when any exist.
    let mut w_final = vec![0.0f64; d];
    for i in 0..n {
        if alphas[i] > 0.0 {
            for j in 0..d {
                w_final[j] += alphas[i] * y[i] * z[i][j];
            }
        }
    }
    let margin_sv: Vec<usize> = (0..n)
        .filter(|&i| {
            let ci = box_of(i);
            alphas[i] > 1e-9 * ci && alphas[i] < ci * (1.0 - 1e-9)
        })
        .collect();
    let b_final = if margin_sv.is_empty() {
        b
    } else {
        margin_sv
            .iter()
            .map(|&i| y[i] - dot(&w_final, &z[i]))
            .sum::<f64>()
            / margin_sv.len() as f64
    };
    let residual_final = kkt_violation(&alphas, &w_final, b_final);
    let converged = residual_final < tol;
    let objective = alphas.iter().sum::<f64>() - 0.5 * dot(&w_final, &w_final);

    Ok(SvmModel {
        weight_vector: w_final,
        bias: b_final,
        feature_means: means,
        feature_stds: stds,
        c_pos,
        c_neg,
        training_kkt_residual: residual_final,
        converged,
        dual_objective: objective,
        alphas,
        feature_names: data.feature_names().to_vec(),
    })
}

#[allow(clippy::too_many_arguments)]
fn optimize_pair(
    i: usize,
    j: usize,
    z: &[Vec<f64>],
    y: &[f64],
    alphas: &mut [f64],
    w: &mut [f64],
    b: &mut f64,
    box_of: &dyn Fn(usize) -> f64,
    dot: &dyn Fn(&[f64], &[f64]) -> f64,
) -> bool {
    if i == j {
        return false;
    }
    let (ci, cj) = (box_of(i), box_of(j));
    let (ai_old, aj_old) = (alphas[i], alphas[j]);
    let e_i = dot(w, &z[i]) + *b - y[i];
    let e_j = dot(w, &z[j]) + *b - y[j];

    let (low, high) = if y[i] == y[j] {
        (
            (ai_old + aj_old - ci).max(0.0),
            (ai_old + aj_old).min(cj),
        )
    } else {
        (
            (aj_old - ai_old).max(0.0),
            (ci + aj_old - ai_old).min(cj),
        )
    };
    if high - low < ALPHA_TOL {
        return false;
    }

    let k_ii = dot(&z[i], &z[i]);
    let k_jj = dot(&z[j], &z[j]);
    let k_ij = dot(&z[i], &z[j]);
    let eta = k_ii + k_jj - 2.0 * k_ij;
    if eta <= 0.0 {
        return false;
    }

    let aj_new = (aj_old + y[j] * (e_i - e_j) / eta).clamp(low, high);
    if (aj_new - aj_old).abs() < ALPHA_TOL {
        return false;
    }
    let ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new);

    let di = y[i] * (ai_new - ai_old);
    let dj = y[j] * (aj_new - aj_old);
    for (wk, (zi, zj)) in w.iter_mut().zip(z[i].iter().zip(z[j].iter())) {
        *wk += di * zi + dj * zj;
    }

    let b1 = *b - e_i - di * k_ii - dj * k_ij;
    let b2 = *b - e_j - di * k_ij - dj * k_jj;
    *b = if ai_new > 0.0 && ai_new < ci {
        b1
    } else if aj_new > 0.0 && aj_new < cj {
        b2
    } else {
        0.5 * (b1 + b2)
    };

    alphas[i] = ai_new;
    alphas[j] = aj_new;
    true
}
