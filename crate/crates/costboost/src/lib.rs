//! Cost-sensitive ensemble classification for imbalanced ordinal survey
//! data.
//!
//! The crate predicts binary favor/dislike preferences from 1–5 survey
//! ratings where the classes are skewed and the two kinds of mistake carry
//! different costs. A 2×2 [`boosting::CostMatrix`] states those costs, and
//! four learners share it:
//!
//! * [`bagging`] — bootstrap-aggregated deep trees with out-of-bag error
//!   curves, permutation feature importance, and threshold selection;
//! * [`boosting`] — AdaBoost.M1 and GentleBoost over weighted shallow
//!   trees, with the costs folded into the initial observation weights;
//! * [`svm`] — a linear soft-margin SVM baseline with class-weighted box
//!   constraints;
//! * [`eval`] — confusion matrices, precision/recall/accuracy, stratified
//!   cross-validation, cost sweeps, and report emission.
//!
//! [`dataset`] handles ingestion: survey CSV parsing, ordinal→binary target
//! construction with listwise deletion, imbalance profiling, stratified
//! splits, and a seeded synthetic generator. [`model`] persists every
//! trained learner in one versioned text container.
//!
//! All training is deterministic given (inputs, seed); parallel execution
//! produces bit-identical results to sequential runs.
//!
//! ```
//! use costboost::boosting::{fit_adaboost_m1, CostMatrix};
//! use costboost::dataset::synth_survey;
//! use costboost::tree::TreeParams;
//!
//! # fn main() -> Result<(), costboost::Error> {
//! let data = synth_survey(200, 0.7, 4, &[0, 1], 0.8, 42)?;
//! let cost = CostMatrix::dislike_penalty(5.0)?;
//! let model = fit_adaboost_m1(&data, &cost, 30, TreeParams::boosting_default(), None, 42)?;
//! assert_eq!(model.predict(data.row(0))?, data.label(0));
//! # Ok(())
//! # }
//! ```
//!
//! The mdbook guide under `book/` walks through every module; its code
//! blocks compile and run as doc-tests of this crate.

// Validation code writes `!(x > 0.0)` on purpose: unlike `x <= 0.0` it also
// rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bagging;
pub mod boosting;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod model;
pub mod svm;
pub mod tree;

pub(crate) mod rng;

pub use dataset::{BinaryDataset, Label, SurveyTable};
pub use error::{Error, Result};

// Run the book's code blocks under `cargo test --doc`, keeping the guide
// and the library in lockstep.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/datasets.md")]
    pub struct Datasets;
    #[doc = include_str!("../../../book/src/trees.md")]
    pub struct Trees;
    #[doc = include_str!("../../../book/src/bagging.md")]
    pub struct Bagging;
    #[doc = include_str!("../../../book/src/costs.md")]
    pub struct Costs;
    #[doc = include_str!("../../../book/src/boosting.md")]
    pub struct Boosting;
    #[doc = include_str!("../../../book/src/svm.md")]
    pub struct Svm;
    #[doc = include_str!("../../../book/src/evaluation.md")]
    pub struct Evaluation;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
