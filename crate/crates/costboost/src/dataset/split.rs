//! Stratified k-fold split plans.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{BinaryDataset, Label};
use crate::error::{Error, Result};

/// A fold assignment for every row of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    k: usize,
    fold_assignment: Vec<usize>,
    seed: u64,
}

impl SplitPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fold_assignment(&self) -> &[usize] {
        &self.fold_assignment
    }

    /// Row indices held out by fold `f`.
    pub fn fold_rows(&self, f: usize) -> Vec<usize> {
        self.fold_assignment
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == f)
            .map(|(i, _)| i)
            .collect()
    }

    /// Row indices used for training when fold `f` is held out.
    pub fn train_rows(&self, f: usize) -> Vec<usize> {
        self.fold_assignment
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != f)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Assign rows to `k` folds, keeping each class spread evenly.
///
/// Deterministic given the seed. Per-fold class counts differ from the ideal
/// n_class/k by less than one row, and total fold sizes differ by at most
/// one.
pub fn stratified_kfold(dataset: &BinaryDataset, k: usize, seed: u64) -> Result<SplitPlan> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be at least 2, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; dataset.n_rows()];
    // Extras from successive classes rotate through the folds so that the
    // totals stay balanced even though each class distributes separately.
    let mut extra_offset = 0usize;
    for class in [Label::Dislike, Label::Favor] {
        let mut idx: Vec<usize> = (0..dataset.n_rows())
            .filter(|&i| dataset.label(i) == class)
            .collect();
        if idx.len() < k {
            return Err(Error::TooFewSamples {
                class: class.name().to_string(),
                count: idx.len(),
                k,
            });
        }
        idx.shuffle(&mut rng);
        let q = idx.len() / k;
        let r = idx.len() % k;
        let mut pos = 0usize;
        for fold in 0..k {
            let in_window = (0..r).any(|o| (extra_offset + o) % k == fold);
            let count = q + usize::from(in_window);
            for _ in 0..count {
                assignment[idx[pos]] = fold;
                pos += 1;
            }
        }
        extra_offset = (extra_offset + r) % k;
    }
    Ok(SplitPlan {
        k,
        fold_assignment: assignment,
        seed,
    })
}
