//! Seeded synthetic survey generator.
//!
//! Produces desk-scale imbalanced datasets whose favor/dislike ratio is
//! controlled exactly, with a chosen subset of planted informative features.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{binarize, BinaryDataset, Label, SurveyTable};
use crate::error::{Error, Result};

/// Target column name used by generated tables.
pub const SYNTH_TARGET: &str = "target";

/// Mean shift applied to informative features, per unit of label sign.
const SIGNAL_SHIFT: f64 = 1.0;

/// Generate an ordinal survey table with a planted signal.
///
/// Labels are fixed so that the favor count is `round(n × favor_fraction)`,
/// then shuffled. Informative features are drawn around `3 ± 1` depending
/// on the label with Gaussian jitter of `noise_level`, quantized to 1..=5;
/// the remaining features are uniform on 1..=5 independent of the label.
/// The target cell is drawn from {4, 5} for favor rows and {1, 2, 3} for
/// dislike rows, so binarizing at threshold 4 recovers the labels exactly.
pub fn synth_survey_table(
    n: usize,
    favor_fraction: f64,
    d: usize,
    informative: &[usize],
    noise_level: f64,
    seed: u64,
) -> Result<SurveyTable> {
    if n == 0 {
        return Err(Error::EmptyDataset("requested n = 0".into()));
    }
    if !(favor_fraction > 0.0 && favor_fraction < 1.0) {
        return Err(Error::InvalidFraction(favor_fraction));
    }
    if d == 0 {
        return Err(Error::NoFeatureColumns);
    }
    if let Some(&bad) = informative.iter().find(|&&j| j >= d) {
        return Err(Error::InvalidInput(format!(
            "informative feature index {bad} out of range for d = {d}"
        )));
    }
    if !(noise_level >= 0.0 && noise_level.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "noise_level must be finite and nonnegative, got {noise_level}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_favor = (n as f64 * favor_fraction).round() as usize;
    let mut labels = vec![Label::Favor; n_favor];
    labels.extend(vec![Label::Dislike; n - n_favor]);
    labels.shuffle(&mut rng);

    let mut is_informative = vec![false; d];
    for &j in informative {
        is_informative[j] = true;
    }

    let mut rows = Vec::with_capacity(n);
    for &label in &labels {
        let mut row = Vec::with_capacity(d + 1);
        for &informative in &is_informative {
            let value = if informative {
                let z: f64 = rng.sample(StandardNormal);
                quantize(3.0 + SIGNAL_SHIFT * label.sign() + noise_level * z)
            } else {
                rng.gen_range(1..=5)
            };
            row.push(Some(value));
        }
        let target = match label {
            Label::Favor => rng.gen_range(4..=5),
            Label::Dislike => rng.gen_range(1..=3),
        };
        row.push(Some(target));
        rows.push(row);
    }

    let mut names: Vec<String> = (0..d).map(|j| format!("f{j}")).collect();
    names.push(SYNTH_TARGET.to_string());
    SurveyTable::new(names, rows)
}

/// Generate a ready-to-train binary dataset; see [`synth_survey_table`].
pub fn synth_survey(
    n: usize,
    favor_fraction: f64,
    d: usize,
    informative: &[usize],
    noise_level: f64,
    seed: u64,
) -> Result<BinaryDataset> {
    let table = synth_survey_table(n, favor_fraction, d, informative, noise_level, seed)?;
    binarize(&table, SYNTH_TARGET, 4)
}

fn quantize(v: f64) -> u8 {
    v.round().clamp(1.0, 5.0) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_counts_match_fraction_exactly() {
        let data = synth_survey(890, 791.0 / 890.0, 4, &[0, 1], 1.0, 7).unwrap();
        let (dislike, favor) = data.class_counts();
        assert_eq!(favor, 791);
        assert_eq!(dislike, 99);
        assert_eq!(data.dropped_rows(), 0);
    }

    #[test]
    fn frequency_deviation_below_one_over_n() {
        for seed in 0..5 {
            let f = 0.37;
            let n = 203;
            let data = synth_survey(n, f, 3, &[0], 1.0, seed).unwrap();
            let (_, favor) = data.class_counts();
            assert!((favor as f64 / n as f64 - f).abs() < 1.0 / n as f64);
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = synth_survey(120, 0.7, 6, &[1, 4], 0.8, 99).unwrap();
        let b = synth_survey(120, 0.7, 6, &[1, 4], 0.8, 99).unwrap();
        assert_eq!(a, b);
        let c = synth_survey(120, 0.7, 6, &[1, 4], 0.8, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn features_are_quantized_ordinals() {
        let data = synth_survey(150, 0.5, 5, &[0, 2], 2.5, 3).unwrap();
        for i in 0..data.n_rows() {
            for &v in data.row(i) {
                assert!((1.0..=5.0).contains(&v));
                assert_eq!(v, v.round());
            }
        }
    }

    #[test]
    fn informative_features_shift_with_label() {
        let data = synth_survey(600, 0.5, 2, &[0], 0.5, 5).unwrap();
        let mean = |label: Label, j: usize| {
            let vals: Vec<f64> = (0..data.n_rows())
                .filter(|&i| data.label(i) == label)
                .map(|i| data.value(i, j))
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        assert!(mean(Label::Favor, 0) - mean(Label::Dislike, 0) > 1.0);
        // Non-informative feature stays label-independent.
        assert!((mean(Label::Favor, 1) - mean(Label::Dislike, 1)).abs() < 0.4);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            synth_survey(10, 0.0, 2, &[], 1.0, 0).unwrap_err(),
            Error::InvalidFraction(_)
        ));
        assert!(matches!(
            synth_survey(10, 1.0, 2, &[], 1.0, 0).unwrap_err(),
            Error::InvalidFraction(_)
        ));
        assert!(synth_survey(10, 0.5, 2, &[5], 1.0, 0).is_err());
        // Empty informative set is legal: a pure-noise dataset.
        assert!(synth_survey(10, 0.5, 2, &[], 1.0, 0).is_ok());
    }
}
