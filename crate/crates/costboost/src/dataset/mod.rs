//! Survey ingestion and dataset construction.
//!
//! The pipeline starts from ordinal survey tables (1–5 ratings with missing
//! cells), binarizes one column into a ±1 target, profiles the class
//! imbalance, and produces stratified cross-validation splits. A seeded
//! synthetic generator provides desk-scale stand-ins with a controllable
//! favor/dislike ratio.

mod binary;
mod split;
mod survey;
mod synth;

pub use binary::{binarize, imbalance_profile, BinaryDataset, ImbalanceProfile, Label};
pub use split::{stratified_kfold, SplitPlan};
pub use survey::{load_survey_csv, SurveyTable, DATASET_VERSION_LINE};
pub use synth::{synth_survey, synth_survey_table, SYNTH_TARGET};

pub(crate) use survey::csv_field;
