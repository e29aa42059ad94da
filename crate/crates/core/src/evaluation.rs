//! Run-level evaluation and cross-run summaries.
//!
//! A *run* is one fold of a cross-validation or one model evaluated on a
//! held-out cohort. Each run yields per-station and ItS precision/recall/F1,
//! FS RMSE, optional frame-level Dice and ROI balanced accuracy. Runs are
//! then summarized as mean and population std.

use alloc::string::String;
use alloc::vec::Vec;

use crate::anatomy::{OrganClass, ORGAN_COUNT, STATION_COUNT};
use crate::constants::ScoringConstants;
use crate::frame::{BinaryMask, ConfidenceFrame};
use crate::metrics::{
    balanced_accuracy, dice_from_counts, fs_rmse, its_confusions, mean_defined,
    normalized_rmse, precision_recall_f1, station_confusions, summarize_runs, ConfusionCounts,
    MetricSummary, PrecisionRecallF1,
};
use crate::pipeline::{threshold_organ_masks, threshold_pc_mask, PipelineError, StationVector, VideoAssessment};
use crate::raster::RasterData;
use crate::score::{compute_fs, compute_its, FagottiScore, Indication};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvaluationError {
    #[error("run `{0}` has no videos")]
    EmptyRun(String),
    #[error("every video in run `{0}` failed to score")]
    AllVideosFailed(String),
    #[error("video `{0}` has no ground truth")]
    MissingGroundTruth(String),
    #[error("no runs to summarize")]
    NoRuns,
}

/// Reference standard for one video.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundTruth {
    pub station_positive: StationVector,
    pub fs: FagottiScore,
    pub its: Indication,
}

impl GroundTruth {
    /// Derives FS and ItS from the station vector with the default rule.
    pub fn from_stations(station_positive: StationVector) -> Self {
        let c = ScoringConstants::default();
        let fs = compute_fs(&station_positive, &c);
        Self {
            station_positive,
            fs,
            its: compute_its(fs, &c),
        }
    }

    /// `fs == 2 * positives` and `its` contraindicated iff `fs >= 8`.
    pub fn is_consistent(&self) -> bool {
        *self == Self::from_stations(self.station_positive)
    }
}

/// The video-level part of a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictionSummary {
    pub station_positive: StationVector,
    pub fs: FagottiScore,
    pub its: Indication,
}

impl From<&VideoAssessment> for PredictionSummary {
    fn from(a: &VideoAssessment) -> Self {
        Self {
            station_positive: a.station_positive,
            fs: a.fs,
            its: a.its,
        }
    }
}

impl From<GroundTruth> for PredictionSummary {
    fn from(g: GroundTruth) -> Self {
        Self {
            station_positive: g.station_positive,
            fs: g.fs,
            its: g.its,
        }
    }
}

/// Overlap counts behind one Dice value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OverlapCounts {
    pub intersection: u64,
    pub reference: u64,
    pub predicted: u64,
}

impl OverlapCounts {
    pub fn of(gt: &BinaryMask, pred: &BinaryMask) -> Self {
        Self {
            intersection: gt.intersection_count(pred) as u64,
            reference: gt.count() as u64,
            predicted: pred.count() as u64,
        }
    }

    pub fn dice(&self) -> Option<f64> {
        dice_from_counts(self.intersection, self.reference, self.predicted)
    }
}

/// Frame-level segmentation overlaps; `None` where the reference is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameSegmentation {
    pub organs: Option<[OverlapCounts; ORGAN_COUNT]>,
    pub pc: Option<OverlapCounts>,
}

/// Compares thresholded predictions against whatever reference rasters the
/// frame carries.
pub fn frame_segmentation(
    frame: &ConfidenceFrame,
    constants: &ScoringConstants,
) -> Result<FrameSegmentation, PipelineError> {
    frame.validate()?;
    let (w, h) = (frame.width(), frame.height());
    let organs = match &frame.gt_labels {
        Some(gt) => {
            let RasterData::Label(labels) = &gt.data else {
                unreachable!("validated as label raster")
            };
            let preds = threshold_organ_masks(frame, constants)?;
            Some(core::array::from_fn(|o| {
                let label = OrganClass::ALL[o].label();
                let reference = BinaryMask::from_bits(w, h, labels.iter().map(|&l| l == label).collect())
                    .expect("validated size");
                OverlapCounts::of(&reference, &preds[o])
            }))
        }
        None => None,
    };
    let pc = match &frame.gt_pc {
        Some(gt) => {
            let RasterData::Label(bits) = &gt.data else {
                unreachable!("validated as label raster")
            };
            let reference = BinaryMask::from_bits(w, h, bits.iter().map(|&b| b == 1).collect())
                .expect("validated size");
            Some(OverlapCounts::of(&reference, &threshold_pc_mask(frame, constants)?))
        }
        None => None,
    };
    Ok(FrameSegmentation { organs, pc })
}

/// How per-frame Dice values become one run-level value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiceAveraging {
    /// Mean of per-frame Dice, skipping frames where it is undefined.
    #[default]
    PerFrame,
    /// Dice of the overlap counts summed over all frames.
    Pooled,
}

/// Everything the evaluator needs about one video.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoRecord {
    pub video_id: String,
    pub ground_truth: Option<GroundTruth>,
    /// `Err` carries the reason the video could not be scored.
    pub prediction: Result<PredictionSummary, String>,
    pub segmentation: Vec<FrameSegmentation>,
    /// ROI discriminator decisions on frames with a reference ROI flag.
    pub roi: ConfusionCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassMetrics {
    pub counts: ConfusionCounts,
    pub scores: PrecisionRecallF1,
}

impl ClassMetrics {
    fn from_counts(counts: ConfusionCounts) -> Self {
        Self {
            counts,
            scores: precision_recall_f1(&counts),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub label: String,
    pub n_videos: usize,
    /// `(video_id, reason)` for videos that could not be scored. They are
    /// left out of every video-level metric.
    pub failures: Vec<(String, String)>,
    pub stations: [ClassMetrics; STATION_COUNT],
    /// Macro average over stations of the defined values.
    pub station_average: PrecisionRecallF1,
    /// Index 0: FS below cut-off, index 1: FS at or above cut-off.
    pub its: [ClassMetrics; 2],
    pub its_average: PrecisionRecallF1,
    pub rmse: Option<f64>,
    pub normalized_rmse: Option<f64>,
    pub dice_organs: [Option<f64>; ORGAN_COUNT],
    pub dice_organ_average: Option<f64>,
    pub dice_pc: Option<f64>,
    pub roi: ConfusionCounts,
    pub roi_balanced_accuracy: Option<f64>,
}

fn macro_average(rows: &[ClassMetrics]) -> PrecisionRecallF1 {
    PrecisionRecallF1 {
        precision: mean_defined(rows.iter().map(|r| r.scores.precision)),
        recall: mean_defined(rows.iter().map(|r| r.scores.recall)),
        f1: mean_defined(rows.iter().map(|r| r.scores.f1)),
    }
}

fn run_dice(
    frames: &[OverlapCounts],
    averaging: DiceAveraging,
) -> Option<f64> {
    match averaging {
        DiceAveraging::PerFrame => mean_defined(frames.iter().map(OverlapCounts::dice)),
        DiceAveraging::Pooled => {
            let mut total = OverlapCounts::default();
            for f in frames {
                total.intersection += f.intersection;
                total.reference += f.reference;
                total.predicted += f.predicted;
            }
            total.dice()
        }
    }
}

pub fn evaluate_run(
    label: &str,
    records: &[VideoRecord],
    constants: &ScoringConstants,
    averaging: DiceAveraging,
) -> Result<RunReport, EvaluationError> {
    if records.is_empty() {
        return Err(EvaluationError::EmptyRun(label.into()));
    }
    let mut failures = Vec::new();
    let mut preds = Vec::new();
    let mut gts = Vec::new();
    for r in records {
        let gt = r
            .ground_truth
            .ok_or_else(|| EvaluationError::MissingGroundTruth(r.video_id.clone()))?;
        match &r.prediction {
            Ok(p) => {
                preds.push(*p);
                gts.push(gt);
            }
            Err(reason) => failures.push((r.video_id.clone(), reason.clone())),
        }
    }
    if preds.is_empty() {
        return Err(EvaluationError::AllVideosFailed(label.into()));
    }

    let pred_st: Vec<StationVector> = preds.iter().map(|p| p.station_positive).collect();
    let gt_st: Vec<Option<StationVector>> = gts.iter().map(|g| Some(g.station_positive)).collect();
    let station_counts = station_confusions(&pred_st, &gt_st).expect("lengths match, truth present");
    let stations = station_counts.map(ClassMetrics::from_counts);

    let pred_its: Vec<Indication> = preds.iter().map(|p| p.its).collect();
    let gt_its: Vec<Indication> = gts.iter().map(|g| g.its).collect();
    let its = its_confusions(&pred_its, &gt_its)
        .expect("lengths match")
        .map(ClassMetrics::from_counts);

    let pred_fs: Vec<u32> = preds.iter().map(|p| p.fs.value()).collect();
    let gt_fs: Vec<u32> = gts.iter().map(|g| g.fs.value()).collect();
    let rmse = fs_rmse(&pred_fs, &gt_fs).ok();

    let dice_organs: [Option<f64>; ORGAN_COUNT] = core::array::from_fn(|o| {
        let frames: Vec<OverlapCounts> = records
            .iter()
            .flat_map(|r| r.segmentation.iter())
            .filter_map(|s| s.organs.map(|c| c[o]))
            .collect();
        run_dice(&frames, averaging)
    });
    let pc_frames: Vec<OverlapCounts> = records
        .iter()
        .flat_map(|r| r.segmentation.iter())
        .filter_map(|s| s.pc)
        .collect();

    let mut roi = ConfusionCounts::default();
    for r in records {
        roi += r.roi;
    }

    Ok(RunReport {
        label: label.into(),
        n_videos: records.len(),
        failures,
        station_average: macro_average(&stations),
        stations,
        its_average: macro_average(&its),
        its,
        rmse,
        normalized_rmse: rmse.map(|x| normalized_rmse(x, constants)),
        dice_organ_average: mean_defined(dice_organs.iter().copied()),
        dice_organs,
        dice_pc: run_dice(&pc_frames, averaging),
        roi,
        roi_balanced_accuracy: balanced_accuracy(&roi).ok(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScoreSummary {
    pub precision: Option<MetricSummary>,
    pub recall: Option<MetricSummary>,
    pub f1: Option<MetricSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortSummary {
    pub stations: [ScoreSummary; STATION_COUNT],
    pub station_average: ScoreSummary,
    pub its: [ScoreSummary; 2],
    pub its_average: ScoreSummary,
    pub rmse: Option<MetricSummary>,
    pub normalized_rmse: Option<MetricSummary>,
    pub dice_organs: [Option<MetricSummary>; ORGAN_COUNT],
    pub dice_organ_average: Option<MetricSummary>,
    pub dice_pc: Option<MetricSummary>,
    pub roi_balanced_accuracy: Option<MetricSummary>,
    /// Videos excluded for failing to score, summed over runs.
    pub failed_videos: usize,
}

fn summary_of(values: impl IntoIterator<Item = Option<f64>>) -> Option<MetricSummary> {
    let v: Vec<Option<f64>> = values.into_iter().collect();
    summarize_runs(&v).ok()
}

fn score_summary<'a>(scores: impl Iterator<Item = &'a PrecisionRecallF1> + Clone) -> ScoreSummary {
    ScoreSummary {
        precision: summary_of(scores.clone().map(|s| s.precision)),
        recall: summary_of(scores.clone().map(|s| s.recall)),
        f1: summary_of(scores.map(|s| s.f1)),
    }
}

/// Mean and population std of every metric across runs, in run order.
pub fn summarize(runs: &[RunReport]) -> Result<CohortSummary, EvaluationError> {
    if runs.is_empty() {
        return Err(EvaluationError::NoRuns);
    }
    Ok(CohortSummary {
        stations: core::array::from_fn(|s| score_summary(runs.iter().map(|r| &r.stations[s].scores))),
        station_average: score_summary(runs.iter().map(|r| &r.station_average)),
        its: core::array::from_fn(|k| score_summary(runs.iter().map(|r| &r.its[k].scores))),
        its_average: score_summary(runs.iter().map(|r| &r.its_average)),
        rmse: summary_of(runs.iter().map(|r| r.rmse)),
        normalized_rmse: summary_of(runs.iter().map(|r| r.normalized_rmse)),
        dice_organs: core::array::from_fn(|o| summary_of(runs.iter().map(|r| r.dice_organs[o]))),
        dice_organ_average: summary_of(runs.iter().map(|r| r.dice_organ_average)),
        dice_pc: summary_of(runs.iter().map(|r| r.dice_pc)),
        roi_balanced_accuracy: summary_of(runs.iter().map(|r| r.roi_balanced_accuracy)),
        failed_videos: runs.iter().map(|r| r.failures.len()).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anatomy::Station;
    use alloc::format;
    use alloc::vec;

    fn stations(bits: u8) -> StationVector {
        core::array::from_fn(|s| bits & (1 << s) != 0)
    }

    fn record(id: usize, gt: u8, pred: Option<u8>) -> VideoRecord {
        let g = GroundTruth::from_stations(stations(gt));
        VideoRecord {
            video_id: format!("v{id}"),
            ground_truth: Some(g),
            prediction: match pred {
                Some(p) => Ok(GroundTruth::from_stations(stations(p)).into()),
                None => Err("NoAssessableFrames".into()),
            },
            segmentation: vec![],
            roi: ConfusionCounts::default(),
        }
    }

    #[test]
    fn ground_truth_consistency() {
        let g = GroundTruth::from_stations(stations(0b1));
        assert_eq!(g.fs.value(), 2);
        assert!(g.is_consistent());
        let bad = GroundTruth {
            fs: FagottiScore::new(4).unwrap(),
            ..g
        };
        assert!(!bad.is_consistent());
        let g = GroundTruth::from_stations(stations(0b1111));
        assert_eq!(g.its, Indication::SurgeryContraindicated);
    }

    #[test]
    fn oracle_predictions_are_perfect() {
        let recs: Vec<_> = (0..16u8).map(|i| record(i as usize, i * 4 % 64, Some(i * 4 % 64))).collect();
        let r = evaluate_run("oracle", &recs, &ScoringConstants::default(), DiceAveraging::PerFrame).unwrap();
        assert_eq!(r.rmse, Some(0.0));
        assert_eq!(r.normalized_rmse, Some(0.0));
        for s in r.stations.iter().chain(&r.its) {
            if s.counts.tp > 0 {
                assert_eq!(s.scores.f1, Some(1.0));
            }
            assert_eq!((s.counts.fp, s.counts.fn_), (0, 0));
        }
    }

    #[test]
    fn all_negative_predictor_has_zero_recall() {
        let recs: Vec<_> = (0..6).map(|i| record(i, 0b000011, Some(0))).collect();
        let r = evaluate_run("neg", &recs, &ScoringConstants::default(), DiceAveraging::PerFrame).unwrap();
        assert_eq!(r.stations[Station::Diaphragm as usize].scores.recall, Some(0.0));
        assert_eq!(r.stations[Station::Diaphragm as usize].scores.precision, None);
        assert_eq!(r.stations[Station::Bowel as usize].scores.recall, None);
        assert!((r.rmse.unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn failures_are_excluded_and_listed() {
        let recs = vec![record(0, 0b1, Some(0b1)), record(1, 0b11, None)];
        let r = evaluate_run("f", &recs, &ScoringConstants::default(), DiceAveraging::PerFrame).unwrap();
        assert_eq!(r.failures, vec![("v1".into(), "NoAssessableFrames".into())]);
        assert_eq!(r.rmse, Some(0.0));
        assert_eq!(r.n_videos, 2);

        let none = vec![record(0, 0b1, None)];
        assert_eq!(
            evaluate_run("f", &none, &ScoringConstants::default(), DiceAveraging::PerFrame),
            Err(EvaluationError::AllVideosFailed("f".into()))
        );
        let mut missing = vec![record(0, 0b1, Some(0))];
        missing[0].ground_truth = None;
        assert_eq!(
            evaluate_run("f", &missing, &ScoringConstants::default(), DiceAveraging::PerFrame),
            Err(EvaluationError::MissingGroundTruth("v0".into()))
        );
    }

    #[test]
    fn dice_averaging_modes() {
        let a = OverlapCounts { intersection: 1, reference: 1, predicted: 1 };
        let b = OverlapCounts { intersection: 0, reference: 9, predicted: 1 };
        let empty = OverlapCounts::default();
        let frames = [a, b, empty];
        assert_eq!(run_dice(&frames, DiceAveraging::PerFrame), Some(0.5));
        assert!((run_dice(&frames, DiceAveraging::Pooled).unwrap() - 2.0 / 12.0).abs() < 1e-12);
        assert_eq!(run_dice(&[empty], DiceAveraging::PerFrame), None);
    }

    #[test]
    fn summary_across_runs() {
        let c = ScoringConstants::default();
        let run_a = evaluate_run("a", &[record(0, 0b1, Some(0b1))], &c, DiceAveraging::PerFrame).unwrap();
        let run_b = evaluate_run("b", &[record(0, 0b1, Some(0b11))], &c, DiceAveraging::PerFrame).unwrap();
        let s = summarize(&[run_a, run_b]).unwrap();
        let rmse = s.rmse.unwrap();
        assert_eq!((rmse.mean, rmse.std, rmse.n), (1.0, 1.0, 2));
        let d = s.stations[0].f1.unwrap();
        assert_eq!((d.mean, d.std), (1.0, 0.0));
        assert!(s.dice_pc.is_none());
        assert_eq!(summarize(&[]), Err(EvaluationError::NoRuns));
    }
}
