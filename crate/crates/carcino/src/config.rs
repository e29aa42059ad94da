//! JSON files that configure a run: scoring-constant overrides, synthetic
//! cohort specs and Monte Carlo sweep definitions. Omitted fields take
//! their defaults.

use std::path::Path;

use carcino_core::synth::{NoiseSpec, SynthSpec};
use carcino_core::{Connectivity, ScoringConstants, STATION_COUNT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maskio::read_json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectivityName {
    Four,
    Eight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsFile {
    pub organ_confidence_threshold: f32,
    pub pc_confidence_threshold: f32,
    pub points_per_positive_station: u32,
    pub its_cutoff: u32,
    pub frame_sampling_interval: f64,
    pub fs_step: u32,
    pub roi_threshold: f64,
    pub min_nodule_pixels: usize,
    pub connectivity: ConnectivityName,
}

impl Default for ConstantsFile {
    fn default() -> Self {
        ScoringConstants::default().into()
    }
}

impl From<ScoringConstants> for ConstantsFile {
    fn from(c: ScoringConstants) -> Self {
        Self {
            organ_confidence_threshold: c.organ_confidence_threshold,
            pc_confidence_threshold: c.pc_confidence_threshold,
            points_per_positive_station: c.points_per_positive_station,
            its_cutoff: c.its_cutoff,
            frame_sampling_interval: c.frame_sampling_interval,
            fs_step: c.fs_step,
            roi_threshold: c.roi_threshold,
            min_nodule_pixels: c.min_nodule_pixels,
            connectivity: match c.connectivity {
                Connectivity::Four => ConnectivityName::Four,
                Connectivity::Eight => ConnectivityName::Eight,
            },
        }
    }
}

impl From<ConstantsFile> for ScoringConstants {
    fn from(f: ConstantsFile) -> Self {
        Self {
            organ_confidence_threshold: f.organ_confidence_threshold,
            pc_confidence_threshold: f.pc_confidence_threshold,
            points_per_positive_station: f.points_per_positive_station,
            its_cutoff: f.its_cutoff,
            frame_sampling_interval: f.frame_sampling_interval,
            fs_step: f.fs_step,
            roi_threshold: f.roi_threshold,
            min_nodule_pixels: f.min_nodule_pixels,
            connectivity: match f.connectivity {
                ConnectivityName::Four => Connectivity::Four,
                ConnectivityName::Eight => Connectivity::Eight,
            },
        }
    }
}

pub fn load_constants(path: Option<&Path>) -> Result<ScoringConstants> {
    let c: ScoringConstants = match path {
        Some(p) => read_json::<ConstantsFile>(p)?.into(),
        None => ScoringConstants::default(),
    };
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseFile {
    pub confidence_jitter: f64,
    pub boundary_morph: f64,
    pub false_blob_rate: f64,
    pub miss_rate: f64,
}

impl Default for NoiseFile {
    fn default() -> Self {
        NoiseSpec::default().into()
    }
}

impl From<NoiseSpec> for NoiseFile {
    fn from(n: NoiseSpec) -> Self {
        Self {
            confidence_jitter: n.confidence_jitter,
            boundary_morph: n.boundary_morph,
            false_blob_rate: n.false_blob_rate,
            miss_rate: n.miss_rate,
        }
    }
}

impl From<NoiseFile> for NoiseSpec {
    fn from(n: NoiseFile) -> Self {
        Self {
            confidence_jitter: n.confidence_jitter,
            boundary_morph: n.boundary_morph,
            false_blob_rate: n.false_blob_rate,
            miss_rate: n.miss_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpecFile {
    pub seed: u64,
    pub n_videos: usize,
    /// `[width, height]`.
    pub frame_size: (u32, u32),
    pub frames_per_video: usize,
    pub irrelevant_frames_per_video: usize,
    pub station_prevalence: [f64; STATION_COUNT],
    pub nodules_per_positive_station: (u32, u32),
    pub noise: NoiseFile,
}

impl Default for SpecFile {
    fn default() -> Self {
        SynthSpec::default().into()
    }
}

impl From<SynthSpec> for SpecFile {
    fn from(s: SynthSpec) -> Self {
        Self {
            seed: s.seed,
            n_videos: s.n_videos,
            frame_size: (s.frame_width, s.frame_height),
            frames_per_video: s.frames_per_video,
            irrelevant_frames_per_video: s.irrelevant_frames_per_video,
            station_prevalence: s.station_prevalence,
            nodules_per_positive_station: s.nodules_per_positive_station,
            noise: s.noise.into(),
        }
    }
}

impl From<SpecFile> for SynthSpec {
    fn from(s: SpecFile) -> Self {
        Self {
            seed: s.seed,
            n_videos: s.n_videos,
            frame_width: s.frame_size.0,
            frame_height: s.frame_size.1,
            frames_per_video: s.frames_per_video,
            irrelevant_frames_per_video: s.irrelevant_frames_per_video,
            station_prevalence: s.station_prevalence,
            nodules_per_positive_station: s.nodules_per_positive_station,
            noise: s.noise.into(),
        }
    }
}

pub fn load_spec(path: &Path) -> Result<SynthSpec> {
    let spec: SynthSpec = read_json::<SpecFile>(path)?.into();
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseLevel {
    #[serde(default)]
    pub label: String,
    pub noise: NoiseFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub replicates: usize,
    pub levels: Vec<NoiseLevel>,
}

pub fn load_sweep(path: &Path) -> Result<SweepFile> {
    let s: SweepFile = read_json(path)?;
    if s.replicates == 0 {
        return Err(Error::Validation("sweep: replicates must be at least 1".into()));
    }
    if s.levels.is_empty() {
        return Err(Error::Validation("sweep: no noise levels".into()));
    }
    for l in &s.levels {
        NoiseSpec::from(l.noise).validate()?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_constants_file_gives_defaults() {
        let f: ConstantsFile = serde_json::from_str("{}").unwrap();
        assert_eq!(ScoringConstants::from(f), ScoringConstants::default());
    }

    #[test]
    fn partial_override() {
        let f: ConstantsFile =
            serde_json::from_str(r#"{"pc_confidence_threshold": 0.8, "connectivity": "four"}"#).unwrap();
        let c = ScoringConstants::from(f);
        assert_eq!(c.pc_confidence_threshold, 0.8);
        assert_eq!(c.connectivity, Connectivity::Four);
        assert_eq!(c.organ_confidence_threshold, 0.70);
        assert_eq!(c.its_cutoff, 8);
    }

    #[test]
    fn unknown_constant_rejected() {
        assert!(serde_json::from_str::<ConstantsFile>(r#"{"pc_threshold": 0.8}"#).is_err());
    }

    #[test]
    fn spec_file_round_trip() {
        let s = SynthSpec::default();
        let f = SpecFile::from(s.clone());
        let text = serde_json::to_string(&f).unwrap();
        let back: SpecFile = serde_json::from_str(&text).unwrap();
        assert_eq!(SynthSpec::from(back), s);
    }

    #[test]
    fn negative_jitter_fails_validation() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("spec.json");
        std::fs::write(&p, r#"{"noise": {"confidence_jitter": -0.1}}"#).unwrap();
        let err = load_spec(&p).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::exit::VALIDATION);
    }
}
