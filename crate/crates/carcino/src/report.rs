//! Serializable report documents and their text rendering. Text is always
//! rendered from the document, so `carcino report` reproduces it from a
//! saved JSON file.

use std::fmt::Write as _;

use carcino_core::evaluation::{ClassMetrics, CohortSummary, DiceAveraging, RunReport, ScoreSummary};
use carcino_core::metrics::{ConfusionCounts, MetricSummary, PrecisionRecallF1};
use carcino_core::{FrameAssessment, OrganClass, ScoringConstants, Station, VideoAssessment};
use serde::{Deserialize, Serialize};

use crate::cohort::CohortEvaluation;
use crate::config::{ConstantsFile, NoiseFile, SpecFile};
use crate::maskio::{ItsLabel, StationFlags};
use crate::simulate::LevelResult;

pub const KIND_ASSESSMENT: &str = "video_assessment";
pub const KIND_COHORT: &str = "cohort_report";
pub const KIND_SWEEP: &str = "sweep_report";

pub const AS_AVERAGE: &str = "AS Involvement Average";
pub const ITS_AVERAGE: &str = "ItS Average";
pub const ORGAN_AVERAGE: &str = "Average for anatomical structures";
pub const PC_ROW: &str = "Peritoneal Carcinomatosis";

pub fn its_row_labels(constants: &ScoringConstants) -> [String; 2] {
    [
        format!("ItS < {}", constants.its_cutoff),
        format!("ItS \u{2265} {}", constants.its_cutoff),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoduleOut {
    pub id: usize,
    pub size: usize,
    pub assigned_organ: Option<String>,
    /// Overlapping organ pixels, by organ code.
    pub overlap_counts: [u32; 8],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameOut {
    pub frame_index: u64,
    pub station_positive: StationFlags,
    pub nodules: Vec<NoduleOut>,
}

impl From<&FrameAssessment> for FrameOut {
    fn from(f: &FrameAssessment) -> Self {
        Self {
            frame_index: f.frame_index,
            station_positive: f.station_positive.into(),
            nodules: f
                .nodules
                .iter()
                .map(|n| NoduleOut {
                    id: n.id,
                    size: n.size(),
                    assigned_organ: n.assigned_organ.map(|o| o.name().to_string()),
                    overlap_counts: n.overlap_counts,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentReport {
    pub kind: String,
    pub video_id: String,
    pub station_positive: StationFlags,
    pub fs: u32,
    pub its: ItsLabel,
    pub frames_used: usize,
    pub frames: Vec<FrameOut>,
}

impl From<&VideoAssessment> for AssessmentReport {
    fn from(a: &VideoAssessment) -> Self {
        Self {
            kind: KIND_ASSESSMENT.into(),
            video_id: a.video_id.clone(),
            station_positive: a.station_positive.into(),
            fs: a.fs.value(),
            its: a.its.into(),
            frames_used: a.frames_used,
            frames: a.frames.iter().map(FrameOut::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl From<PrecisionRecallF1> for Scores {
    fn from(s: PrecisionRecallF1) -> Self {
        Self {
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class: String,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    #[serde(flatten)]
    pub scores: Scores,
}

impl ClassRow {
    fn new(class: impl Into<String>, m: &ClassMetrics) -> Self {
        Self {
            class: class.into(),
            tp: m.counts.tp,
            fp: m.counts.fp,
            tn: m.counts.tn,
            fn_: m.counts.fn_,
            scores: m.scores.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub video_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueRow {
    pub class: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiceOut {
    pub organs: Vec<ValueRow>,
    pub organ_average: Option<f64>,
    pub pc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiOut {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub balanced_accuracy: Option<f64>,
}

impl RoiOut {
    fn new(c: &ConfusionCounts, balanced_accuracy: Option<f64>) -> Self {
        Self {
            tp: c.tp,
            fp: c.fp,
            tn: c.tn,
            fn_: c.fn_,
            balanced_accuracy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOut {
    pub label: String,
    pub n_videos: usize,
    pub failures: Vec<Failure>,
    pub stations: Vec<ClassRow>,
    pub station_average: Scores,
    pub its: Vec<ClassRow>,
    pub its_average: Scores,
    pub rmse: Option<f64>,
    pub normalized_rmse: Option<f64>,
    pub dice: DiceOut,
    pub roi: RoiOut,
}

impl RunOut {
    pub fn new(r: &RunReport, constants: &ScoringConstants) -> Self {
        let its_labels = its_row_labels(constants);
        Self {
            label: r.label.clone(),
            n_videos: r.n_videos,
            failures: r
                .failures
                .iter()
                .map(|(video_id, reason)| Failure {
                    video_id: video_id.clone(),
                    reason: reason.clone(),
                })
                .collect(),
            stations: Station::ALL
                .iter()
                .zip(&r.stations)
                .map(|(s, m)| ClassRow::new(s.display_name(), m))
                .collect(),
            station_average: r.station_average.into(),
            its: its_labels.iter().zip(&r.its).map(|(l, m)| ClassRow::new(l.as_str(), m)).collect(),
            its_average: r.its_average.into(),
            rmse: r.rmse,
            normalized_rmse: r.normalized_rmse,
            dice: DiceOut {
                organs: OrganClass::ALL
                    .iter()
                    .zip(&r.dice_organs)
                    .map(|(o, &value)| ValueRow {
                        class: o.display_name().into(),
                        value,
                    })
                    .collect(),
                organ_average: r.dice_organ_average,
                pc: r.dice_pc,
            },
            roi: RoiOut::new(&r.roi, r.roi_balanced_accuracy),
        }
    }
}

/// Mirror of [`MetricSummary`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    pub excluded: usize,
}

impl From<MetricSummary> for Stat {
    fn from(s: MetricSummary) -> Self {
        Self {
            mean: s.mean,
            std: s.std,
            n: s.n,
            excluded: s.excluded,
        }
    }
}

fn stat(s: Option<MetricSummary>) -> Option<Stat> {
    s.map(Stat::from)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummaryRow {
    pub class: String,
    pub precision: Option<Stat>,
    pub recall: Option<Stat>,
    pub f1: Option<Stat>,
}

impl ScoreSummaryRow {
    fn new(class: impl Into<String>, s: &ScoreSummary) -> Self {
        Self {
            class: class.into(),
            precision: stat(s.precision),
            recall: stat(s.recall),
            f1: stat(s.f1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatRow {
    pub class: String,
    pub summary: Option<Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryOut {
    pub stations: Vec<ScoreSummaryRow>,
    pub station_average: ScoreSummaryRow,
    pub its: Vec<ScoreSummaryRow>,
    pub its_average: ScoreSummaryRow,
    pub rmse: Option<Stat>,
    pub normalized_rmse: Option<Stat>,
    pub dice_organs: Vec<StatRow>,
    pub dice_organ_average: Option<Stat>,
    pub dice_pc: Option<Stat>,
    pub roi_balanced_accuracy: Option<Stat>,
    pub failed_videos: usize,
}

impl SummaryOut {
    pub fn new(s: &CohortSummary, constants: &ScoringConstants) -> Self {
        let its_labels = its_row_labels(constants);
        Self {
            stations: Station::ALL
                .iter()
                .zip(&s.stations)
                .map(|(st, m)| ScoreSummaryRow::new(st.display_name(), m))
                .collect(),
            station_average: ScoreSummaryRow::new(AS_AVERAGE, &s.station_average),
            its: its_labels
                .iter()
                .zip(&s.its)
                .map(|(l, m)| ScoreSummaryRow::new(l.as_str(), m))
                .collect(),
            its_average: ScoreSummaryRow::new(ITS_AVERAGE, &s.its_average),
            rmse: stat(s.rmse),
            normalized_rmse: stat(s.normalized_rmse),
            dice_organs: OrganClass::ALL
                .iter()
                .zip(&s.dice_organs)
                .map(|(o, &m)| StatRow {
                    class: o.display_name().into(),
                    summary: stat(m),
                })
                .collect(),
            dice_organ_average: stat(s.dice_organ_average),
            dice_pc: stat(s.dice_pc),
            roi_balanced_accuracy: stat(s.roi_balanced_accuracy),
            failed_videos: s.failed_videos,
        }
    }
}

fn averaging_name(a: DiceAveraging) -> String {
    match a {
        DiceAveraging::PerFrame => "per_frame",
        DiceAveraging::Pooled => "pooled",
    }
    .into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortReport {
    pub kind: String,
    pub mode: String,
    pub cohort: String,
    pub constants: ConstantsFile,
    pub dice_averaging: String,
    pub runs: Vec<RunOut>,
    pub summary: SummaryOut,
}

impl CohortReport {
    pub fn new(e: &CohortEvaluation, constants: &ScoringConstants, averaging: DiceAveraging) -> Self {
        Self {
            kind: KIND_COHORT.into(),
            mode: e.mode.into(),
            cohort: e.cohort.clone(),
            constants: (*constants).into(),
            dice_averaging: averaging_name(averaging),
            runs: e.runs.iter().map(|r| RunOut::new(r, constants)).collect(),
            summary: SummaryOut::new(&e.summary, constants),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOut {
    pub replicate: usize,
    pub seed: u64,
    pub failed_videos: usize,
    pub rmse: Option<f64>,
    pub normalized_rmse: Option<f64>,
    pub station_f1: Vec<Option<f64>>,
    pub as_average_f1: Option<f64>,
    pub its_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelOut {
    pub label: String,
    pub noise: NoiseFile,
    pub replicates: Vec<ReplicateOut>,
    pub normalized_rmse: Option<Stat>,
    pub rmse: Option<Stat>,
    pub station_f1: Vec<StatRow>,
    pub as_average_f1: Option<Stat>,
    pub its_f1: Option<Stat>,
    pub failed_videos: usize,
}

impl From<&LevelResult> for LevelOut {
    fn from(l: &LevelResult) -> Self {
        Self {
            label: l.level.label.clone(),
            noise: l.level.noise.into(),
            replicates: l
                .runs
                .iter()
                .zip(&l.seeds)
                .enumerate()
                .map(|(i, (r, &seed))| ReplicateOut {
                    replicate: i,
                    seed,
                    failed_videos: r.failures.len(),
                    rmse: r.rmse,
                    normalized_rmse: r.normalized_rmse,
                    station_f1: r.stations.iter().map(|s| s.scores.f1).collect(),
                    as_average_f1: r.station_average.f1,
                    its_f1: r.its_average.f1,
                })
                .collect(),
            normalized_rmse: stat(l.summary.normalized_rmse),
            rmse: stat(l.summary.rmse),
            station_f1: Station::ALL
                .iter()
                .zip(&l.summary.stations)
                .map(|(s, m)| StatRow {
                    class: s.display_name().into(),
                    summary: stat(m.f1),
                })
                .collect(),
            as_average_f1: stat(l.summary.station_average.f1),
            its_f1: stat(l.summary.its_average.f1),
            failed_videos: l.summary.failed_videos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub kind: String,
    pub base_spec: SpecFile,
    pub constants: ConstantsFile,
    pub levels: Vec<LevelOut>,
}

impl SweepReport {
    pub fn new(base: SpecFile, constants: &ScoringConstants, levels: &[LevelResult]) -> Self {
        Self {
            kind: KIND_SWEEP.into(),
            base_spec: base,
            constants: (*constants).into(),
            levels: levels.iter().map(LevelOut::from).collect(),
        }
    }
}

// Text rendering.

const NA: &str = "n/a";

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| NA.into(), |v| format!("{:.1}", v * 100.0))
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| NA.into(), |v| format!("{v:.2}"))
}

fn pct_stat(s: Option<Stat>) -> String {
    s.map_or_else(
        || NA.into(),
        |s| format!("{:.1} \u{b1} {:.1}", s.mean * 100.0, s.std * 100.0),
    )
}

fn num_stat(s: Option<Stat>) -> String {
    s.map_or_else(|| NA.into(), |s| format!("{:.2} \u{b1} {:.2}", s.mean, s.std))
}

fn excluded_note(stats: &[Option<Stat>]) -> Option<usize> {
    stats.iter().flatten().map(|s| s.excluded).max().filter(|&e| e > 0)
}

/// Left-aligned first column, right-aligned rest, widths from content.
fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |out: &mut String, cells: &[String]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            let pad = w - cell.chars().count();
            if i == 0 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str("   ");
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(out, &header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    let rule: usize = widths.iter().sum::<usize>() + 3 * (cols - 1);
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for r in rows {
        line(out, r);
    }
}

fn score_row(r: &ScoreSummaryRow) -> Vec<String> {
    vec![r.class.clone(), pct_stat(r.precision), pct_stat(r.recall), pct_stat(r.f1)]
}

pub fn render_assessment(a: &AssessmentReport) -> String {
    let mut out = String::new();
    let flags: carcino_core::pipeline::StationVector = a.station_positive.into();
    writeln!(out, "Video {}", a.video_id).unwrap();
    writeln!(out, "Frames used: {}", a.frames_used).unwrap();
    let rows: Vec<Vec<String>> = Station::ALL
        .iter()
        .map(|s| {
            let hit = flags[*s as usize];
            let frames = a
                .frames
                .iter()
                .filter(|f| <[bool; 6]>::from(f.station_positive)[*s as usize])
                .count();
            vec![
                s.display_name().into(),
                if hit { "positive" } else { "negative" }.into(),
                frames.to_string(),
            ]
        })
        .collect();
    out.push('\n');
    table(&mut out, &["Station", "Involvement", "Frames"], &rows);
    let its = match a.its {
        ItsLabel::SurgeryIndicated => "surgery indicated",
        ItsLabel::SurgeryContraindicated => "surgery contraindicated",
    };
    writeln!(out, "\nFagotti score: {}\nIndication: {its}", a.fs).unwrap();
    out
}

pub fn render_cohort(r: &CohortReport) -> String {
    let s = &r.summary;
    let mut out = String::new();
    let name = if r.cohort.is_empty() { "cohort" } else { &r.cohort };
    writeln!(
        out,
        "Cohort `{name}`, {} ({} run{}), mean \u{b1} std over runs",
        r.mode.replace('_', " "),
        r.runs.len(),
        if r.runs.len() == 1 { "" } else { "s" }
    )
    .unwrap();

    out.push('\n');
    let mut rows: Vec<Vec<String>> = s.stations.iter().map(score_row).collect();
    rows.push(score_row(&s.station_average));
    rows.extend(s.its.iter().map(score_row));
    rows.push(score_row(&s.its_average));
    table(&mut out, &["AS Involvement (%)", "Precision", "Recall", "F1-score"], &rows);

    out.push('\n');
    writeln!(out, "FS RMSE:            {}", num_stat(s.rmse)).unwrap();
    writeln!(out, "FS normalized RMSE: {}", num_stat(s.normalized_rmse)).unwrap();

    if s.dice_organs.iter().any(|d| d.summary.is_some()) || s.dice_pc.is_some() {
        out.push('\n');
        let mut rows: Vec<Vec<String>> = s
            .dice_organs
            .iter()
            .map(|d| vec![d.class.clone(), pct_stat(d.summary)])
            .collect();
        rows.push(vec![ORGAN_AVERAGE.into(), pct_stat(s.dice_organ_average)]);
        rows.push(vec![PC_ROW.into(), pct_stat(s.dice_pc)]);
        table(&mut out, &["Segmentation", "Dice (%)"], &rows);
    }
    if s.roi_balanced_accuracy.is_some() {
        writeln!(out, "\nROI balanced accuracy (%): {}", pct_stat(s.roi_balanced_accuracy)).unwrap();
    }

    out.push('\n');
    let rows: Vec<Vec<String>> = r
        .runs
        .iter()
        .map(|run| {
            vec![
                run.label.clone(),
                run.n_videos.to_string(),
                pct(run.station_average.f1),
                pct(run.its_average.f1),
                num(run.rmse),
                num(run.normalized_rmse),
                pct(run.dice.organ_average),
                pct(run.dice.pc),
            ]
        })
        .collect();
    table(
        &mut out,
        &["Run", "Videos", "AS F1", "ItS F1", "RMSE", "nRMSE", "Organ Dice", "PC Dice"],
        &rows,
    );

    out.push('\n');
    writeln!(out, "Excluded videos: {}", s.failed_videos).unwrap();
    for run in &r.runs {
        for f in &run.failures {
            writeln!(out, "  {}: {} ({})", run.label, f.video_id, f.reason).unwrap();
        }
    }
    let mut all: Vec<Option<Stat>> = vec![s.rmse, s.normalized_rmse, s.dice_organ_average, s.dice_pc];
    for row in s.stations.iter().chain(s.its.iter()) {
        all.extend([row.precision, row.recall, row.f1]);
    }
    if let Some(e) = excluded_note(&all) {
        writeln!(out, "Some metrics were undefined in up to {e} run(s) and left out of mean \u{b1} std.").unwrap();
    }
    out
}

pub fn render_sweep(r: &SweepReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "Noise sweep: {} level(s), {} videos per replicate, mean \u{b1} std over replicates",
        r.levels.len(),
        r.base_spec.n_videos
    )
    .unwrap();
    out.push('\n');
    let rows: Vec<Vec<String>> = r
        .levels
        .iter()
        .map(|l| {
            vec![
                l.label.clone(),
                l.replicates.len().to_string(),
                num_stat(l.rmse),
                num_stat(l.normalized_rmse),
                pct_stat(l.as_average_f1),
                pct_stat(l.its_f1),
                l.failed_videos.to_string(),
            ]
        })
        .collect();
    table(
        &mut out,
        &["Level", "Replicates", "RMSE", "nRMSE", "AS F1 (%)", "ItS F1 (%)", "Excluded"],
        &rows,
    );
    out
}

fn csv_stat(out: &mut Vec<String>, s: Option<Stat>) {
    match s {
        Some(s) => {
            out.push(s.mean.to_string());
            out.push(s.std.to_string());
        }
        None => out.extend([String::new(), String::new()]),
    }
}

/// One row per level; undefined values are empty cells.
pub fn render_sweep_csv(r: &SweepReport) -> String {
    let mut header: Vec<String> = [
        "label",
        "confidence_jitter",
        "boundary_morph",
        "false_blob_rate",
        "miss_rate",
        "replicates",
        "excluded_videos",
        "rmse_mean",
        "rmse_std",
        "nrmse_mean",
        "nrmse_std",
        "as_f1_mean",
        "as_f1_std",
        "its_f1_mean",
        "its_f1_std",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for s in Station::ALL {
        header.push(format!("{}_f1_mean", s.name()));
        header.push(format!("{}_f1_std", s.name()));
    }
    let mut out = header.join(",");
    out.push('\n');
    for l in &r.levels {
        let mut row = vec![
            csv_field(&l.label),
            l.noise.confidence_jitter.to_string(),
            l.noise.boundary_morph.to_string(),
            l.noise.false_blob_rate.to_string(),
            l.noise.miss_rate.to_string(),
            l.replicates.len().to_string(),
            l.failed_videos.to_string(),
        ];
        csv_stat(&mut row, l.rmse);
        csv_stat(&mut row, l.normalized_rmse);
        csv_stat(&mut row, l.as_average_f1);
        csv_stat(&mut row, l.its_f1);
        for s in &l.station_f1 {
            csv_stat(&mut row, s.summary);
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns_columns() {
        let mut out = String::new();
        table(
            &mut out,
            &["A", "B"],
            &[vec!["long name".into(), "1".into()], vec!["x".into(), "100.0".into()]],
        );
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], format!("A{}B", " ".repeat(15)));
        assert_eq!(lines[2], format!("long name{}1", " ".repeat(7)));
        assert_eq!(lines[3], format!("x{}100.0", " ".repeat(11)));
    }

    #[test]
    fn stat_formatting() {
        let s = Some(Stat {
            mean: 0.74,
            std: 0.03,
            n: 4,
            excluded: 0,
        });
        assert_eq!(pct_stat(s), "74.0 \u{b1} 3.0");
        assert_eq!(num_stat(s), "0.74 \u{b1} 0.03");
        assert_eq!(pct_stat(None), "n/a");
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
