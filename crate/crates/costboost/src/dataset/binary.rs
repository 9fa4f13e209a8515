//! Binary classification datasets built from ordinal survey tables.

use crate::dataset::SurveyTable;
use crate::error::{Error, Result};

/// Class label: dislike is the negative class (−1), favor the positive (+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Dislike,
    Favor,
}

impl Label {
    /// Numeric value in {−1, +1}.
    pub fn sign(self) -> f64 {
        match self {
            Label::Dislike => -1.0,
            Label::Favor => 1.0,
        }
    }

    /// Class index in (dislike, favor) order, shared by cost and confusion
    /// matrices.
    pub fn index(self) -> usize {
        match self {
            Label::Dislike => 0,
            Label::Favor => 1,
        }
    }

    /// Decode a real-valued score. Zero breaks ties toward dislike.
    pub fn from_score(score: f64) -> Label {
        if score > 0.0 {
            Label::Favor
        } else {
            Label::Dislike
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Dislike => Label::Favor,
            Label::Favor => Label::Dislike,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Dislike => "dislike",
            Label::Favor => "favor",
        }
    }

    pub fn from_name(name: &str) -> Option<Label> {
        match name {
            "dislike" => Some(Label::Dislike),
            "favor" => Some(Label::Favor),
            _ => None,
        }
    }
}

/// A complete numeric feature matrix with ±1 labels.
///
/// Construction guarantees no missing values and finite features; `n ≥ 1`
/// and `d ≥ 1` always hold.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDataset {
    feature_names: Vec<String>,
    features: Vec<f64>, // row-major, n_rows × n_features
    labels: Vec<Label>,
    target_name: String,
    dropped_rows: usize,
}

impl BinaryDataset {
    pub fn from_parts(
        feature_names: Vec<String>,
        features: Vec<f64>,
        labels: Vec<Label>,
        target_name: impl Into<String>,
    ) -> Result<Self> {
        let d = feature_names.len();
        let n = labels.len();
        if d == 0 {
            return Err(Error::NoFeatureColumns);
        }
        if n == 0 {
            return Err(Error::EmptyDataset("no rows".into()));
        }
        if features.len() != n * d {
            return Err(Error::InvalidInput(format!(
                "feature matrix has {} entries, expected {} × {}",
                features.len(),
                n,
                d
            )));
        }
        if let Some(bad) = features.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite feature value {bad}")));
        }
        Ok(Self {
            feature_names,
            features,
            labels,
            target_name: target_name.into(),
            dropped_rows: 0,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.features[i * d..(i + 1) * d]
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features() + feature]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    /// Rows removed by listwise deletion during binarization.
    pub fn dropped_rows(&self) -> usize {
        self.dropped_rows
    }

    /// (dislike, favor) counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let favor = self.labels.iter().filter(|l| **l == Label::Favor).count();
        (self.labels.len() - favor, favor)
    }

    /// New dataset restricted to the given rows (indices may repeat).
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset("row subset is empty".into()));
        }
        let d = self.n_features();
        let mut features = Vec::with_capacity(rows.len() * d);
        let mut labels = Vec::with_capacity(rows.len());
        for &i in rows {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Ok(Self {
            feature_names: self.feature_names.clone(),
            features,
            labels,
            target_name: self.target_name.clone(),
            dropped_rows: 0,
        })
    }

    /// New dataset keeping only the named features, in the given order.
    pub fn select_features(&self, names: &[String]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::NoFeatureColumns);
        }
        let mut cols = Vec::with_capacity(names.len());
        for name in names {
            let idx = self
                .feature_names
                .iter()
                .position(|f| f == name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown feature {name:?}")))?;
            cols.push(idx);
        }
        let mut features = Vec::with_capacity(self.n_rows() * cols.len());
        for i in 0..self.n_rows() {
            let row = self.row(i);
            features.extend(cols.iter().map(|&c| row[c]));
        }
        Ok(Self {
            feature_names: names.to_vec(),
            features,
            labels: self.labels.clone(),
            target_name: self.target_name.clone(),
            dropped_rows: 0,
        })
    }
}

/// Turn one ordinal column into a ±1 target.
///
/// A rating of `threshold` or above is favor, anything below is dislike.
/// Rows missing the target or any predictor are dropped (listwise deletion);
/// the drop count is recorded on the returned dataset. Remaining ordinal
/// predictors become real-valued features on the 1.0–5.0 scale.
pub fn binarize(table: &SurveyTable, target_column: &str, threshold: u8) -> Result<BinaryDataset> {
    if !(2..=5).contains(&threshold) {
        return Err(Error::InvalidThreshold(i64::from(threshold)));
    }
    let target_idx = table
        .column_index(target_column)
        .ok_or_else(|| Error::MissingTargetColumn(target_column.to_string()))?;
    let feature_cols: Vec<usize> = (0..table.n_columns()).filter(|&c| c != target_idx).collect();
    if feature_cols.is_empty() {
        return Err(Error::NoFeatureColumns);
    }
    let feature_names: Vec<String> = feature_cols
        .iter()
        .map(|&c| table.column_names()[c].clone())
        .collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut dropped = 0usize;
    for row in table.rows() {
        let target = row[target_idx];
        let complete = target.is_some() && feature_cols.iter().all(|&c| row[c].is_some());
        if !complete {
            dropped += 1;
            continue;
        }
        let t = target.unwrap();
        labels.push(if t >= threshold { Label::Favor } else { Label::Dislike });
        features.extend(feature_cols.iter().map(|&c| f64::from(row[c].unwrap())));
    }
    if labels.is_empty() {
        return Err(Error::EmptyDataset(
            "all rows dropped by listwise deletion".into(),
        ));
    }
    let mut dataset = BinaryDataset::from_parts(feature_names, features, labels, target_column)?;
    dataset.dropped_rows = dropped;
    Ok(dataset)
}

/// Class balance of one target column under the fixed 4/5-favor rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceProfile {
    /// Counts of ratings 1..=5, in scale order.
    pub per_scale_counts: [usize; 5],
    pub dislike_count: usize,
    pub favor_count: usize,
    /// Majority count over minority count; infinite when a class is empty.
    pub ratio: f64,
    pub minority_class: Label,
    /// Set when one class has zero count.
    pub degenerate: bool,
}

/// Profile the imbalance of `target_column`, counting non-missing cells only.
pub fn imbalance_profile(table: &SurveyTable, target_column: &str) -> Result<ImbalanceProfile> {
    let target_idx = table
        .column_index(target_column)
        .ok_or_else(|| Error::MissingTargetColumn(target_column.to_string()))?;
    let mut counts = [0usize; 5];
    for row in table.rows() {
        if let Some(v) = row[target_idx] {
            counts[usize::from(v) - 1] += 1;
        }
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyDataset(format!(
            "column {target_column:?} has no non-missing values"
        )));
    }
    let dislike = counts[0] + counts[1] + counts[2];
    let favor = counts[3] + counts[4];
    let degenerate = dislike == 0 || favor == 0;
    let ratio = if degenerate {
        f64::INFINITY
    } else {
        dislike.max(favor) as f64 / dislike.min(favor) as f64
    };
    let minority_class = if favor < dislike { Label::Favor } else { Label::Dislike };
    Ok(ImbalanceProfile {
        per_scale_counts: counts,
        dislike_count: dislike,
        favor_count: favor,
        ratio,
        minority_class,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(names: &[&str], rows: Vec<Vec<Option<u8>>>) -> SurveyTable {
        SurveyTable::new(names.iter().map(|s| s.to_string()).collect(), rows).unwrap()
    }

    /// Table with the given per-scale counts in its only column plus one
    /// constant predictor.
    fn counts_table(counts: [usize; 5]) -> SurveyTable {
        let mut rows = Vec::new();
        for (scale, &count) in counts.iter().enumerate() {
            for _ in 0..count {
                rows.push(vec![Some(scale as u8 + 1), Some(3)]);
            }
        }
        table(&["genre", "other"], rows)
    }

    #[test]
    fn binarize_thresholds_labels() {
        let t = table(
            &["g", "x"],
            vec![
                vec![Some(5), Some(1)],
                vec![Some(4), Some(2)],
                vec![Some(3), Some(3)],
            ],
        );
        let d = binarize(&t, "g", 4).unwrap();
        assert_eq!(d.labels(), &[Label::Favor, Label::Favor, Label::Dislike]);
        assert_eq!(d.feature_names(), &["x".to_string()]);
        assert_eq!(d.row(1), &[2.0]);
        assert_eq!(d.dropped_rows(), 0);
        assert_eq!(d.target_name(), "g");
    }

    #[test]
    fn binarize_drops_missing_target_and_predictors() {
        let mut rows = vec![vec![Some(5), Some(1)]; 8];
        rows.push(vec![None, Some(2)]);
        rows.push(vec![Some(4), None]);
        let t = table(&["g", "x"], rows);
        let d = binarize(&t, "g", 4).unwrap();
        assert_eq!(d.n_rows(), 8);
        assert_eq!(d.dropped_rows(), 2);
    }

    #[test]
    fn binarize_rejects_empty_result_and_bad_threshold() {
        let t = table(&["g", "x"], vec![vec![None, Some(2)]]);
        assert!(matches!(binarize(&t, "g", 4).unwrap_err(), Error::EmptyDataset(_)));
        let t = table(&["g", "x"], vec![vec![Some(5), Some(2)]]);
        assert!(matches!(binarize(&t, "g", 1).unwrap_err(), Error::InvalidThreshold(1)));
        assert!(matches!(
            binarize(&t, "nope", 4).unwrap_err(),
            Error::MissingTargetColumn(_)
        ));
    }

    #[test]
    fn profile_matches_comedy_counts() {
        let p = imbalance_profile(&counts_table([2, 20, 77, 220, 571]), "genre").unwrap();
        assert_eq!(p.dislike_count, 99);
        assert_eq!(p.favor_count, 791);
        assert!((p.ratio - 791.0 / 99.0).abs() < 1e-12);
        assert_eq!(p.minority_class, Label::Dislike);
        assert!(!p.degenerate);
    }

    #[test]
    fn profile_matches_western_counts() {
        let p = imbalance_profile(&counts_table([329, 279, 169, 68, 45]), "genre").unwrap();
        assert_eq!(p.dislike_count, 777);
        assert_eq!(p.favor_count, 113);
        assert!((p.ratio - 777.0 / 113.0).abs() < 1e-12);
        assert_eq!(p.minority_class, Label::Favor);
    }

    #[test]
    fn profile_flags_single_class_as_degenerate() {
        let p = imbalance_profile(&counts_table([0, 0, 0, 0, 12]), "genre").unwrap();
        assert_eq!(p.favor_count, 12);
        assert_eq!(p.dislike_count, 0);
        assert!(p.degenerate);
        assert!(p.ratio.is_infinite());
    }

    #[test]
    fn profile_counts_only_non_missing() {
        let t = table(
            &["g", "x"],
            vec![vec![Some(5), None], vec![None, Some(1)], vec![Some(1), Some(2)]],
        );
        let p = imbalance_profile(&t, "g").unwrap();
        assert_eq!(p.dislike_count + p.favor_count, 2);
    }

    #[test]
    fn select_features_projects_columns() {
        let d = BinaryDataset::from_parts(
            vec!["a".into(), "b".into(), "c".into()],
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 1.0],
            vec![Label::Favor, Label::Dislike],
            "t",
        )
        .unwrap();
        let s = d.select_features(&["c".into(), "a".into()]).unwrap();
        assert_eq!(s.row(0), &[3.0, 1.0]);
        assert_eq!(s.row(1), &[1.0, 4.0]);
        assert!(d.select_features(&["zzz".into()]).is_err());
    }

    #[test]
    fn subset_keeps_requested_rows() {
        let d = BinaryDataset::from_parts(
            vec!["a".into()],
            vec![1.0, 2.0, 3.0],
            vec![Label::Favor, Label::Dislike, Label::Favor],
            "t",
        )
        .unwrap();
        let s = d.subset(&[2, 0]).unwrap();
        assert_eq!(s.row(0), &[3.0]);
        assert_eq!(s.labels(), &[Label::Favor, Label::Favor]);
    }

    proptest! {
        /// Raising a target value never flips favor back to dislike.
        #[test]
        fn binarize_is_monotone_in_target(v in 1u8..=5, bump in 0u8..=4, threshold in 2u8..=5) {
            let raised = (v + bump).min(5);
            let t = table(&["g", "x"], vec![vec![Some(v), Some(1)]]);
            let t2 = table(&["g", "x"], vec![vec![Some(raised), Some(1)]]);
            let low = binarize(&t, "g", threshold).unwrap().label(0);
            let high = binarize(&t2, "g", threshold).unwrap().label(0);
            prop_assert!(!(low == Label::Favor && high == Label::Dislike));
        }

        /// Class counts add up to the number of non-missing target cells.
        #[test]
        fn profile_counts_partition_non_missing(cells in proptest::collection::vec(
            proptest::option::weighted(0.8, 1u8..=5), 1..60))
        {
            prop_assume!(cells.iter().any(Option::is_some));
            let rows = cells.iter().map(|c| vec![*c, Some(1)]).collect();
            let t = table(&["g", "x"], rows);
            let p = imbalance_profile(&t, "g").unwrap();
            let non_missing = cells.iter().filter(|c| c.is_some()).count();
            prop_assert_eq!(p.dislike_count + p.favor_count, non_missing);
            let scale_total: usize = p.per_scale_counts.iter().sum();
            prop_assert_eq!(scale_total, non_missing);
        }
    }
}
