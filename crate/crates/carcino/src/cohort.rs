//! Cohort loading, per-video scoring from disk and the evaluation runner.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use carcino_core::evaluation::{
    evaluate_run, frame_segmentation, summarize, CohortSummary, DiceAveraging, FrameSegmentation,
    GroundTruth, PredictionSummary, RunReport, VideoRecord,
};
use carcino_core::metrics::ConfusionCounts;
use carcino_core::pipeline::{assess_video, classify_frame, passes_roi, PipelineError};
use carcino_core::split::{stratified_kfold, FoldAssignment, SplitItem};
use carcino_core::{ConfidenceFrame, ScoringConstants, VideoAssessment};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maskio::{load_manifest, read_cohort_index, LoadedManifest};

#[derive(Debug, Clone)]
pub struct Cohort {
    pub name: String,
    pub index_path: PathBuf,
    /// In index order.
    pub videos: Vec<LoadedManifest>,
}

impl Cohort {
    pub fn get(&self, video_id: &str) -> Option<&LoadedManifest> {
        self.videos.iter().find(|v| v.manifest.video_id == video_id)
    }

    pub fn ground_truth(&self, video_id: &str) -> Option<GroundTruth> {
        self.get(video_id).and_then(|v| v.manifest.ground_truth())
    }

    /// Fails on the first video (in index order) without ground truth.
    pub fn require_ground_truth(&self) -> Result<()> {
        match self.videos.iter().find(|v| v.manifest.ground_truth.is_none()) {
            Some(v) => Err(Error::Validation(format!(
                "video `{}` has no ground truth",
                v.manifest.video_id
            ))),
            None => Ok(()),
        }
    }

    pub fn split(&self, k: usize, seed: u64) -> Result<FoldAssignment> {
        let items: Vec<SplitItem<'_>> = self
            .videos
            .iter()
            .map(|v| SplitItem {
                video_id: &v.manifest.video_id,
                fs: v.manifest.ground_truth().map(|g| g.fs),
            })
            .collect();
        Ok(stratified_kfold(&items, k, seed)?)
    }
}

/// Loads the index and every manifest it lists. Manifest paths are relative
/// to the index file.
pub fn load_cohort(index_path: &Path) -> Result<Cohort> {
    let index = read_cohort_index(index_path)?;
    let base = index_path.parent().unwrap_or_else(|| Path::new("."));
    let mut seen = BTreeSet::new();
    for e in &index.videos {
        if !seen.insert(e.video_id.as_str()) {
            return Err(Error::Validation(format!(
                "{}: duplicate video id `{}`",
                index_path.display(),
                e.video_id
            )));
        }
    }
    let videos = index
        .videos
        .par_iter()
        .map(|e| {
            let m = load_manifest(&base.join(&e.manifest))?;
            if m.manifest.video_id != e.video_id {
                return Err(Error::Validation(format!(
                    "{}: index lists `{}` but manifest says `{}`",
                    m.path.display(),
                    e.video_id,
                    m.manifest.video_id
                )));
            }
            Ok(m)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Cohort {
        name: index.name,
        index_path: index_path.to_owned(),
        videos,
    })
}

/// The first error in input order, so failures do not depend on scheduling.
fn first_error<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

fn check_dimensions(video_id: &str, frames: &[ConfidenceFrame]) -> Result<()> {
    if let Some(first) = frames.first() {
        let dims = (first.width(), first.height());
        if let Some(f) = frames.iter().find(|f| (f.width(), f.height()) != dims) {
            return Err(Error::Validation(format!(
                "video `{video_id}`: frame {} is {}x{}, earlier frames are {}x{}",
                f.frame_index,
                f.width(),
                f.height(),
                dims.0,
                dims.1
            )));
        }
    }
    Ok(())
}

fn classify_in_order(
    video_id: &str,
    frames: &[&ConfidenceFrame],
    constants: &ScoringConstants,
) -> std::result::Result<VideoAssessment, PipelineError> {
    let assessed = frames
        .par_iter()
        .map(|f| classify_frame(f, constants))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    assess_video(video_id, assessed, constants)
}

/// Scores one video. Only frames passing the ROI filter are read from disk.
pub fn score_video(manifest: &LoadedManifest, constants: &ScoringConstants) -> Result<VideoAssessment> {
    let id = manifest.manifest.video_id.as_str();
    let frames = first_error(
        manifest
            .manifest
            .frames
            .par_iter()
            .filter(|r| passes_roi(r.roi_score, constants.roi_threshold))
            .map(|r| manifest.load_frame(r, false))
            .collect(),
    )?;
    check_dimensions(id, &frames)?;
    let refs: Vec<&ConfidenceFrame> = frames.iter().collect();
    classify_in_order(id, &refs, constants).map_err(|e| Error::pipeline(id, e))
}

pub fn roi_counts(
    frames: impl IntoIterator<Item = (f64, Option<bool>)>,
    constants: &ScoringConstants,
) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for (score, truth) in frames {
        if let Some(actual) = truth {
            c.record(passes_roi(score, constants.roi_threshold), actual);
        }
    }
    c
}

/// Builds an evaluation record from frames already in memory. Scoring
/// failures become part of the record; malformed rasters are errors.
pub fn record_from_frames(
    video_id: &str,
    ground_truth: Option<GroundTruth>,
    frames: &[ConfidenceFrame],
    constants: &ScoringConstants,
) -> Result<VideoRecord> {
    check_dimensions(video_id, frames)?;
    let passing: Vec<&ConfidenceFrame> = frames
        .iter()
        .filter(|f| passes_roi(f.roi_score, constants.roi_threshold))
        .collect();
    let prediction = classify_in_order(video_id, &passing, constants)
        .map(|a| PredictionSummary::from(&a))
        .map_err(|e| e.to_string());
    let segmentation: Vec<FrameSegmentation> = frames
        .par_iter()
        .filter(|f| f.gt_labels.is_some() || f.gt_pc.is_some())
        .map(|f| frame_segmentation(f, constants).map_err(|e| Error::pipeline(video_id, e)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(VideoRecord {
        video_id: video_id.into(),
        ground_truth,
        prediction,
        segmentation,
        roi: roi_counts(frames.iter().map(|f| (f.roi_score, f.gt_roi)), constants),
    })
}

/// Reads the frames a record needs: those passing the ROI filter and those
/// carrying reference rasters.
pub fn record_from_manifest(
    manifest: &LoadedManifest,
    ground_truth: Option<GroundTruth>,
    constants: &ScoringConstants,
) -> Result<VideoRecord> {
    let frames = first_error(
        manifest
            .manifest
            .frames
            .par_iter()
            .filter(|r| passes_roi(r.roi_score, constants.roi_threshold) || r.has_segmentation_truth())
            .map(|r| manifest.load_frame(r, true))
            .collect(),
    )?;
    let mut record = record_from_frames(&manifest.manifest.video_id, ground_truth, &frames, constants)?;
    // Frames skipped above still count towards ROI accuracy.
    record.roi = roi_counts(
        manifest.manifest.frames.iter().map(|r| (r.roi_score, r.gt_roi)),
        constants,
    );
    Ok(record)
}

fn oracle_record(manifest: &LoadedManifest, ground_truth: GroundTruth) -> VideoRecord {
    VideoRecord {
        video_id: manifest.manifest.video_id.clone(),
        ground_truth: Some(ground_truth),
        prediction: Ok(ground_truth.into()),
        segmentation: Vec::new(),
        roi: ConfusionCounts::default(),
    }
}

#[derive(Debug, Clone)]
pub enum EvaluationPlan {
    /// Each fold is one run; predictions come from the cohort's own manifests.
    CrossValidation(FoldAssignment),
    /// Every model cohort is scored against the full reference cohort. An
    /// empty list evaluates the reference cohort's own predictions once.
    Independent(Vec<Cohort>),
}

impl EvaluationPlan {
    pub fn mode(&self) -> &'static str {
        match self {
            EvaluationPlan::CrossValidation(_) => "cross_validation",
            EvaluationPlan::Independent(_) => "independent",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvaluateOptions {
    pub averaging: DiceAveraging,
    /// Feed ground truth back as the prediction.
    pub oracle: bool,
}

#[derive(Debug, Clone)]
pub struct CohortEvaluation {
    pub mode: &'static str,
    pub cohort: String,
    pub runs: Vec<RunReport>,
    pub summary: CohortSummary,
}

fn records_for(
    reference: &Cohort,
    predictions: &Cohort,
    constants: &ScoringConstants,
    options: EvaluateOptions,
) -> Result<Vec<VideoRecord>> {
    first_error(
        reference
            .videos
            .par_iter()
            .map(|v| {
                let id = &v.manifest.video_id;
                let gt = v.manifest.ground_truth();
                if options.oracle {
                    return Ok(oracle_record(v, gt.expect("checked by require_ground_truth")));
                }
                let source = predictions.get(id).ok_or_else(|| {
                    Error::Validation(format!(
                        "{}: no predictions for video `{id}`",
                        predictions.index_path.display()
                    ))
                })?;
                record_from_manifest(source, gt, constants)
            })
            .collect(),
    )
}

pub fn evaluate_cohort(
    cohort: &Cohort,
    plan: &EvaluationPlan,
    constants: &ScoringConstants,
    options: EvaluateOptions,
) -> Result<CohortEvaluation> {
    cohort.require_ground_truth()?;
    let runs = match plan {
        EvaluationPlan::CrossValidation(folds) => {
            if !folds.is_valid() {
                return Err(Error::Validation("fold assignment is not a partition into nonempty folds".into()));
            }
            for v in &cohort.videos {
                if folds.fold_of(&v.manifest.video_id).is_none() {
                    return Err(Error::Validation(format!(
                        "video `{}` is not in the fold assignment",
                        v.manifest.video_id
                    )));
                }
            }
            if let Some(extra) = folds.assignment.keys().find(|id| cohort.get(id).is_none()) {
                return Err(Error::Validation(format!(
                    "fold assignment names unknown video `{extra}`"
                )));
            }
            let records = records_for(cohort, cohort, constants, options)?;
            (0..folds.k)
                .map(|fold| {
                    let members: Vec<VideoRecord> = records
                        .iter()
                        .filter(|r| folds.fold_of(&r.video_id) == Some(fold))
                        .cloned()
                        .collect();
                    evaluate_run(&format!("fold {fold}"), &members, constants, options.averaging)
                        .map_err(Error::from)
                })
                .collect::<Result<Vec<_>>>()?
        }
        EvaluationPlan::Independent(models) => {
            let single = [cohort.clone()];
            let models = if models.is_empty() { &single[..] } else { &models[..] };
            models
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let records = records_for(cohort, m, constants, options)?;
                    evaluate_run(&format!("model {i}"), &records, constants, options.averaging)
                        .map_err(Error::from)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let summary = summarize(&runs)?;
    Ok(CohortEvaluation {
        mode: plan.mode(),
        cohort: cohort.name.clone(),
        runs,
        summary,
    })
}
