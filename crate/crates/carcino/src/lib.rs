//! File formats, cohort evaluation, synthetic cohorts on disk and the
//! `carcino` command-line driver, built on [`carcino_core`].

pub mod cli;
pub mod cohort;
pub mod config;
pub mod error;
pub mod maskio;
pub mod report;
pub mod simulate;

pub use cohort::{evaluate_cohort, load_cohort, score_video, Cohort, EvaluateOptions, EvaluationPlan};
pub use error::{Error, Result};
pub use maskio::{load_manifest, read_raster, write_raster};
