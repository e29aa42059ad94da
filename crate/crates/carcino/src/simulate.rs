//! Synthetic cohorts on disk and the Monte Carlo noise sweep.

use std::path::{Path, PathBuf};

use carcino_core::evaluation::{
    evaluate_run, summarize, CohortSummary, DiceAveraging, GroundTruth, RunReport, VideoRecord,
};
use carcino_core::synth::{generate_video, oracle_stations, NoiseSpec, SynthSpec, SynthVideo};
use carcino_core::ScoringConstants;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohort::record_from_frames;
use crate::config::SpecFile;
use crate::error::{Error, Result};
use crate::maskio::{
    write_json, write_raster, CohortIndex, FrameRecord, GroundTruthRecord, IndexEntry, StationFlags,
    VideoManifest,
};

pub const INDEX_FILE: &str = "index.json";
pub const ORACLE_FILE: &str = "oracle.json";
pub const SPEC_FILE: &str = "spec.json";

/// Planted truth, recomputed from the planting log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub video_id: String,
    pub stations: StationFlags,
    pub fs: u32,
    pub planted_nodules: usize,
    pub suppressed_nodules: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleFile {
    pub seed: u64,
    pub videos: Vec<OracleEntry>,
}

pub fn oracle_truth(video: &SynthVideo) -> GroundTruth {
    GroundTruth::from_stations(oracle_stations(video))
}

fn generate_all(spec: &SynthSpec) -> Result<Vec<SynthVideo>> {
    spec.validate()?;
    (0..spec.n_videos)
        .into_par_iter()
        .map(|i| generate_video(spec, i).map_err(Error::from))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn write_video(video: &SynthVideo, dir: &Path) -> Result<()> {
    let mut frames = Vec::with_capacity(video.frames.len());
    for f in &video.frames {
        let stem = format!("frames/{:06}", f.frame_index);
        let organ = PathBuf::from(format!("{stem}_organ.msk"));
        let pc = PathBuf::from(format!("{stem}_pc.msk"));
        write_raster(&f.organ_conf, &dir.join(&organ))?;
        write_raster(&f.pc_conf, &dir.join(&pc))?;
        let opt = |r: &Option<carcino_core::Raster>, suffix: &str| -> Result<Option<PathBuf>> {
            match r {
                Some(r) => {
                    let p = PathBuf::from(format!("{stem}_{suffix}.msk"));
                    write_raster(r, &dir.join(&p))?;
                    Ok(Some(p))
                }
                None => Ok(None),
            }
        };
        let gt_labels = opt(&f.gt_labels, "gt_labels")?;
        let gt_pc = opt(&f.gt_pc, "gt_pc")?;
        frames.push(FrameRecord {
            frame_index: f.frame_index,
            time_s: f.time_s,
            organ_conf: organ,
            pc_conf: pc,
            roi_score: f.roi_score,
            gt_labels,
            gt_pc,
            gt_roi: f.gt_roi,
        });
    }
    let manifest = VideoManifest {
        video_id: video.video_id.clone(),
        frames,
        ground_truth: Some(GroundTruthRecord::from_truth(&oracle_truth(video))),
        roi_segments: Some(video.roi_segments.clone()),
    };
    write_json(&dir.join("manifest.json"), &manifest)
}

#[derive(Debug, Clone)]
pub struct WrittenCohort {
    pub index_path: PathBuf,
    pub oracle: OracleFile,
}

/// Writes rasters, manifests, `index.json`, `oracle.json` and the spec
/// itself under `out`. Output bytes depend only on `spec`.
pub fn write_cohort(spec: &SynthSpec, out: &Path) -> Result<WrittenCohort> {
    let videos = generate_all(spec)?;
    videos
        .par_iter()
        .map(|v| write_video(v, &out.join(&v.video_id)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<()>>()?;
    let index = CohortIndex {
        name: "synthetic".into(),
        videos: videos
            .iter()
            .map(|v| IndexEntry {
                video_id: v.video_id.clone(),
                manifest: PathBuf::from(&v.video_id).join("manifest.json"),
            })
            .collect(),
    };
    let oracle = OracleFile {
        seed: spec.seed,
        videos: videos
            .iter()
            .map(|v| {
                let gt = oracle_truth(v);
                OracleEntry {
                    video_id: v.video_id.clone(),
                    stations: gt.station_positive.into(),
                    fs: gt.fs.value(),
                    planted_nodules: v.planting_log.len(),
                    suppressed_nodules: v.planting_log.iter().filter(|p| p.suppressed).count(),
                }
            })
            .collect(),
    };
    let index_path = out.join(INDEX_FILE);
    write_json(&index_path, &index)?;
    write_json(&out.join(ORACLE_FILE), &oracle)?;
    write_json(&out.join(SPEC_FILE), &SpecFile::from(spec.clone()))?;
    Ok(WrittenCohort { index_path, oracle })
}

/// Generates and scores a cohort without touching disk.
pub fn synthetic_records(spec: &SynthSpec, constants: &ScoringConstants) -> Result<Vec<VideoRecord>> {
    let videos = generate_all(spec)?;
    videos
        .par_iter()
        .map(|v| record_from_frames(&v.video_id, Some(oracle_truth(v)), &v.frames, constants))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepLevel {
    pub label: String,
    pub noise: NoiseSpec,
}

#[derive(Debug, Clone)]
pub struct LevelResult {
    pub level: SweepLevel,
    /// Generator seed of each replicate, in replicate order.
    pub seeds: Vec<u64>,
    pub runs: Vec<RunReport>,
    pub summary: CohortSummary,
}

/// Seed of replicate `r`. Shared across levels, so every level sees the
/// same planted truth and only the noise differs.
pub fn replicate_seed(base_seed: u64, replicate: usize) -> u64 {
    base_seed.wrapping_add(replicate as u64)
}

pub fn monte_carlo_sweep(
    base: &SynthSpec,
    levels: &[SweepLevel],
    replicates: usize,
    constants: &ScoringConstants,
    averaging: DiceAveraging,
) -> Result<Vec<LevelResult>> {
    if replicates == 0 {
        return Err(Error::Validation("sweep: replicates must be at least 1".into()));
    }
    levels
        .iter()
        .map(|level| {
            let seeds: Vec<u64> = (0..replicates).map(|r| replicate_seed(base.seed, r)).collect();
            let runs = seeds
                .iter()
                .enumerate()
                .map(|(r, &seed)| {
                    let spec = SynthSpec {
                        seed,
                        noise: level.noise,
                        ..base.clone()
                    };
                    let records = synthetic_records(&spec, constants)?;
                    Ok(evaluate_run(&format!("replicate {r}"), &records, constants, averaging)?)
                })
                .collect::<Result<Vec<_>>>()?;
            let summary = summarize(&runs)?;
            Ok(LevelResult {
                level: level.clone(),
                seeds,
                runs,
                summary,
            })
        })
        .collect()
}
