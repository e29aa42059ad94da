//! On-disk formats: `MSK1` raster files, per-video JSON manifests, the
//! cohort index and fold assignment files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use carcino_core::evaluation::GroundTruth;
use carcino_core::pipeline::{sample_frame_times, StationVector};
use carcino_core::score::InvalidScore;
use carcino_core::split::FoldAssignment;
use carcino_core::{ConfidenceFrame, FagottiScore, Indication, Raster, Station};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn read_raster(path: &Path) -> Result<Raster> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Raster::decode(&bytes).map_err(|source| Error::Raster {
        path: path.to_owned(),
        source,
    })
}

/// Writes `raster` and returns the byte count. Invalid rasters are rejected
/// before the file is created.
pub fn write_raster(raster: &Raster, path: &Path) -> Result<usize> {
    let bytes = raster.encode().map_err(|source| Error::Raster {
        path: path.to_owned(),
        source,
    })?;
    write_bytes(path, &bytes)?;
    Ok(bytes.len())
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_bytes(path, to_json_bytes(value).as_bytes())
}

pub(crate) fn to_json_bytes<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_owned(),
        source,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{0}")]
    MissingField(String),
    #[error("ground truth inconsistent: {0}")]
    GroundTruthInconsistent(String),
    #[error("{0}")]
    Invalid(String),
}

/// Station flags keyed by station name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationFlags {
    pub diaphragm: bool,
    pub liver: bool,
    pub stomach_spleen_lesser_omentum: bool,
    pub greater_omentum: bool,
    pub parietal_peritoneum: bool,
    pub bowel: bool,
}

impl From<StationVector> for StationFlags {
    fn from(v: StationVector) -> Self {
        Self {
            diaphragm: v[Station::Diaphragm as usize],
            liver: v[Station::Liver as usize],
            stomach_spleen_lesser_omentum: v[Station::StomachSpleenLesserOmentum as usize],
            greater_omentum: v[Station::GreaterOmentum as usize],
            parietal_peritoneum: v[Station::ParietalPeritoneum as usize],
            bowel: v[Station::Bowel as usize],
        }
    }
}

impl From<StationFlags> for StationVector {
    fn from(f: StationFlags) -> Self {
        [
            f.diaphragm,
            f.liver,
            f.stomach_spleen_lesser_omentum,
            f.greater_omentum,
            f.parietal_peritoneum,
            f.bowel,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ItsLabel {
    SurgeryIndicated,
    SurgeryContraindicated,
}

impl From<Indication> for ItsLabel {
    fn from(i: Indication) -> Self {
        match i {
            Indication::SurgeryIndicated => ItsLabel::SurgeryIndicated,
            Indication::SurgeryContraindicated => ItsLabel::SurgeryContraindicated,
        }
    }
}

impl From<ItsLabel> for Indication {
    fn from(i: ItsLabel) -> Self {
        match i {
            ItsLabel::SurgeryIndicated => Indication::SurgeryIndicated,
            ItsLabel::SurgeryContraindicated => Indication::SurgeryContraindicated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthRecord {
    pub stations: StationFlags,
    pub fs: u32,
    pub its: ItsLabel,
}

impl GroundTruthRecord {
    pub fn from_truth(g: &GroundTruth) -> Self {
        Self {
            stations: g.station_positive.into(),
            fs: g.fs.value(),
            its: g.its.into(),
        }
    }

    /// Checks `fs == 2 * positives` and the `fs >= 8` indication rule.
    pub fn to_truth(&self) -> Result<GroundTruth, ManifestError> {
        let stations: StationVector = self.stations.into();
        let derived = GroundTruth::from_stations(stations);
        let fs = FagottiScore::new(self.fs).map_err(|InvalidScore(v)| {
            ManifestError::GroundTruthInconsistent(format!("fs {v} is not an even value in 0..=12"))
        })?;
        if fs != derived.fs {
            return Err(ManifestError::GroundTruthInconsistent(format!(
                "fs {} but {} positive stations imply {}",
                self.fs,
                stations.iter().filter(|&&b| b).count(),
                derived.fs
            )));
        }
        let its: Indication = self.its.into();
        if its != derived.its {
            return Err(ManifestError::GroundTruthInconsistent(format!(
                "its {} does not match fs {}",
                its, self.fs
            )));
        }
        Ok(derived)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameRecord {
    pub frame_index: u64,
    pub time_s: f64,
    /// Eight-channel confidence raster, relative to the manifest directory.
    pub organ_conf: PathBuf,
    pub pc_conf: PathBuf,
    pub roi_score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_labels: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_pc: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_roi: Option<bool>,
}

impl FrameRecord {
    pub fn has_segmentation_truth(&self) -> bool {
        self.gt_labels.is_some() || self.gt_pc.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VideoManifest {
    pub video_id: String,
    pub frames: Vec<FrameRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruthRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roi_segments: Option<Vec<(f64, f64)>>,
}

impl VideoManifest {
    pub fn validate(&self) -> Result<(), ManifestError> {
        for pair in self.frames.windows(2) {
            if pair[1].frame_index <= pair[0].frame_index {
                return Err(ManifestError::Invalid(format!(
                    "frame_index {} follows {}: indices must strictly increase",
                    pair[1].frame_index, pair[0].frame_index
                )));
            }
            if pair[1].time_s.is_nan() || pair[1].time_s < pair[0].time_s {
                return Err(ManifestError::Invalid(format!(
                    "time_s {} follows {}: times must not decrease",
                    pair[1].time_s, pair[0].time_s
                )));
            }
        }
        if let Some(f) = self.frames.iter().find(|f| !(0.0..=1.0).contains(&f.roi_score)) {
            return Err(ManifestError::Invalid(format!(
                "frame {}: roi_score {} outside [0, 1]",
                f.frame_index, f.roi_score
            )));
        }
        if let Some(segments) = &self.roi_segments {
            sample_frame_times(segments, 1.0)
                .map_err(|e| ManifestError::Invalid(format!("roi_segments: {e}")))?;
        }
        if let Some(gt) = &self.ground_truth {
            gt.to_truth()?;
        }
        Ok(())
    }

    pub fn ground_truth(&self) -> Option<GroundTruth> {
        self.ground_truth.as_ref().and_then(|g| g.to_truth().ok())
    }
}

fn classify_json_error(e: serde_json::Error) -> ManifestError {
    let msg = e.to_string();
    if msg.starts_with("missing field") {
        ManifestError::MissingField(msg)
    } else {
        ManifestError::Syntax(msg)
    }
}

pub fn parse_manifest(text: &str) -> Result<VideoManifest, ManifestError> {
    let m: VideoManifest = serde_json::from_str(text).map_err(classify_json_error)?;
    m.validate()?;
    Ok(m)
}

/// A parsed manifest plus the directory its raster paths are relative to.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedManifest {
    pub path: PathBuf,
    pub manifest: VideoManifest,
}

impl LoadedManifest {
    pub fn base_dir(&self) -> &Path {
        self.path.parent().unwrap_or_else(|| Path::new("."))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir().join(p)
    }

    /// Reads the rasters of one frame. Dimension consistency is checked
    /// here, lazily, not at manifest load.
    pub fn load_frame(&self, record: &FrameRecord, with_truth: bool) -> Result<ConfidenceFrame> {
        let load_opt = |p: &Option<PathBuf>| -> Result<Option<Raster>> {
            match p {
                Some(p) if with_truth => read_raster(&self.resolve(p)).map(Some),
                _ => Ok(None),
            }
        };
        let frame = ConfidenceFrame {
            frame_index: record.frame_index,
            time_s: record.time_s,
            organ_conf: read_raster(&self.resolve(&record.organ_conf))?,
            pc_conf: read_raster(&self.resolve(&record.pc_conf))?,
            roi_score: record.roi_score,
            gt_labels: load_opt(&record.gt_labels)?,
            gt_pc: load_opt(&record.gt_pc)?,
            gt_roi: record.gt_roi,
        };
        frame.validate().map_err(|e| {
            Error::Validation(format!(
                "video `{}` frame {}: {e}",
                self.manifest.video_id, record.frame_index
            ))
        })?;
        Ok(frame)
    }
}

pub fn load_manifest(path: &Path) -> Result<LoadedManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest = parse_manifest(&text).map_err(|source| Error::Manifest {
        path: path.to_owned(),
        source,
    })?;
    Ok(LoadedManifest {
        path: path.to_owned(),
        manifest,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexEntry {
    pub video_id: String,
    /// Relative to the index file.
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortIndex {
    #[serde(default)]
    pub name: String,
    pub videos: Vec<IndexEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IndexForm {
    Object(CohortIndex),
    List(Vec<IndexEntry>),
}

/// Accepts either `{"name": ..., "videos": [...]}` or a bare list of entries.
pub fn read_cohort_index(path: &Path) -> Result<CohortIndex> {
    let form: IndexForm = read_json(path)?;
    Ok(match form {
        IndexForm::Object(i) => i,
        IndexForm::List(videos) => CohortIndex {
            name: path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            videos,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldFile {
    pub seed: u64,
    pub k: usize,
    pub assignment: BTreeMap<String, usize>,
}

impl From<&FoldAssignment> for FoldFile {
    fn from(a: &FoldAssignment) -> Self {
        Self {
            seed: a.seed,
            k: a.k,
            assignment: a.assignment.clone(),
        }
    }
}

impl FoldFile {
    pub fn into_assignment(self) -> Result<FoldAssignment> {
        let a = FoldAssignment {
            k: self.k,
            seed: self.seed,
            assignment: self.assignment,
        };
        if !a.is_valid() {
            return Err(Error::Validation(format!(
                "fold file: assignment must cover folds 0..{} with each fold nonempty",
                a.k
            )));
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest_json(gt: &str) -> String {
        format!(
            r#"{{
  "video_id": "v1",
  "frames": [
    {{"frame_index": 0, "time_s": 0.0, "organ_conf": "a.msk", "pc_conf": "b.msk", "roi_score": 0.9}},
    {{"frame_index": 1, "time_s": 5.0, "organ_conf": "c.msk", "pc_conf": "d.msk", "roi_score": 0.1, "gt_roi": false}}
  ]{gt}
}}"#
        )
    }

    const STATIONS_D: &str = r#""stations": {"diaphragm": true, "liver": false, "stomach_spleen_lesser_omentum": false, "greater_omentum": false, "parietal_peritoneum": false, "bowel": false}"#;

    #[test]
    fn accepts_consistent_ground_truth() {
        let m = parse_manifest(&manifest_json(&format!(
            r#", "ground_truth": {{{STATIONS_D}, "fs": 2, "its": "SurgeryIndicated"}}"#
        )))
        .unwrap();
        let gt = m.ground_truth().unwrap();
        assert_eq!(gt.fs.value(), 2);
        assert!(gt.station_positive[0]);
        assert_eq!(m.frames.len(), 2);
        assert_eq!(m.frames[1].gt_roi, Some(false));
    }

    #[test]
    fn rejects_fs_station_mismatch() {
        let err = parse_manifest(&manifest_json(&format!(
            r#", "ground_truth": {{{STATIONS_D}, "fs": 4, "its": "SurgeryIndicated"}}"#
        )))
        .unwrap_err();
        assert!(matches!(err, ManifestError::GroundTruthInconsistent(_)), "{err}");
    }

    #[test]
    fn rejects_its_mismatch_at_cutoff() {
        let four = r#""stations": {"diaphragm": true, "liver": true, "stomach_spleen_lesser_omentum": true, "greater_omentum": true, "parietal_peritoneum": false, "bowel": false}"#;
        let err = parse_manifest(&manifest_json(&format!(
            r#", "ground_truth": {{{four}, "fs": 8, "its": "SurgeryIndicated"}}"#
        )))
        .unwrap_err();
        assert!(matches!(err, ManifestError::GroundTruthInconsistent(_)), "{err}");
    }

    #[test]
    fn syntax_and_missing_field() {
        assert!(matches!(parse_manifest("{ nope"), Err(ManifestError::Syntax(_))));
        assert!(matches!(
            parse_manifest(r#"{"video_id": "x"}"#),
            Err(ManifestError::MissingField(_))
        ));
        let partial = r#"{"video_id": "x", "frames": [], "ground_truth": {"stations": {"diaphragm": true}, "fs": 2, "its": "SurgeryIndicated"}}"#;
        assert!(matches!(parse_manifest(partial), Err(ManifestError::MissingField(_))));
    }

    #[test]
    fn frame_order_is_enforced() {
        let text = r#"{"video_id": "x", "frames": [
            {"frame_index": 2, "time_s": 0.0, "organ_conf": "a", "pc_conf": "b", "roi_score": 1.0},
            {"frame_index": 2, "time_s": 5.0, "organ_conf": "a", "pc_conf": "b", "roi_score": 1.0}]}"#;
        assert!(matches!(parse_manifest(text), Err(ManifestError::Invalid(_))));
        let text = r#"{"video_id": "x", "frames": [
            {"frame_index": 1, "time_s": 5.0, "organ_conf": "a", "pc_conf": "b", "roi_score": 1.0},
            {"frame_index": 2, "time_s": 4.0, "organ_conf": "a", "pc_conf": "b", "roi_score": 1.0}]}"#;
        assert!(matches!(parse_manifest(text), Err(ManifestError::Invalid(_))));
    }

    #[test]
    fn overlapping_roi_segments_rejected() {
        let text = r#"{"video_id": "x", "frames": [], "roi_segments": [[0, 10], [5, 20]]}"#;
        assert!(matches!(parse_manifest(text), Err(ManifestError::Invalid(_))));
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let m = parse_manifest(&manifest_json(&format!(
            r#", "ground_truth": {{{STATIONS_D}, "fs": 2, "its": "SurgeryIndicated"}}, "roi_segments": [[0.0, 5.0]]"#
        )))
        .unwrap();
        let back = parse_manifest(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn raster_file_round_trip_and_rejection() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.msk");
        let r = Raster::label(2, 2, 1, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(write_raster(&r, &p).unwrap(), 18);
        assert_eq!(read_raster(&p).unwrap(), r);

        let bad = Raster {
            width: 2,
            height: 2,
            channels: 1,
            data: carcino_core::RasterData::Label(vec![0, 1]),
        };
        let q = dir.path().join("bad.msk");
        assert!(write_raster(&bad, &q).is_err());
        assert!(!q.exists(), "nothing may be written for an invalid raster");

        fs::write(&q, b"MSK2\0\0\0\0\0\0\0\0\x01\x00").unwrap();
        let err = read_raster(&q).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::exit::IO);
        assert!(err.to_string().contains("bad.msk"));
    }

    #[test]
    fn cohort_index_forms() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("idx.json");
        fs::write(&p, r#"[{"video_id": "a", "manifest": "a/manifest.json"}]"#).unwrap();
        let i = read_cohort_index(&p).unwrap();
        assert_eq!(i.name, "idx");
        assert_eq!(i.videos.len(), 1);
        fs::write(&p, r#"{"name": "dev", "videos": []}"#).unwrap();
        assert_eq!(read_cohort_index(&p).unwrap().name, "dev");
    }
}
