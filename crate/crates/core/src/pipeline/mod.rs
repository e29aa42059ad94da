//! From per-frame confidence maps to a video-level FS and indication.
//!
//! ```text
//! ROI filter -> threshold organ/PC maps -> connected components
//!            -> nodule-to-organ assignment -> frame station vector
//!            -> OR over frames -> FS -> indication
//! ```

mod assign;
mod components;
mod sampling;
mod threshold;

use alloc::string::String;
use alloc::vec::Vec;

pub use assign::assign_nodules;
pub use components::{connected_components, label_components};
pub use sampling::{filter_roi_frames, passes_roi, sample_frame_times};
pub use threshold::{threshold_channel, threshold_organ_masks, threshold_pc_mask, threshold_plane};

use crate::anatomy::{station_of, OrganClass, ORGAN_COUNT, STATION_COUNT};
use crate::constants::ScoringConstants;
use crate::frame::{ConfidenceFrame, FrameError};
use crate::score::{compute_fs, compute_its, FagottiScore, Indication};

/// Positivity per station, indexed by station code.
pub type StationVector = [bool; STATION_COUNT];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("sampling interval must be positive, got {0}")]
    NegativeInterval(f64),
    #[error("ROI segments {first:?} and {second:?} overlap")]
    OverlappingSegments { first: (f64, f64), second: (f64, f64) },
    #[error("invalid ROI segment ({start}, {end})")]
    InvalidSegment { start: f64, end: f64 },
    #[error("expected {expected} confidence channels, found {actual}")]
    ChannelCountMismatch { expected: usize, actual: usize },
    #[error("raster size {actual:?} does not match {expected:?}")]
    DimensionMismatch { expected: (u32, u32), actual: (u32, u32) },
    #[error("no frame passed the ROI filter")]
    NoAssessableFrames,
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// One connected component of the thresholded PC mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Nodule {
    /// Ordinal within the frame.
    pub id: usize,
    /// Row-major `(row, col)` pixels.
    pub pixels: Vec<(u32, u32)>,
    /// `None` when the nodule overlaps no organ mask.
    pub assigned_organ: Option<OrganClass>,
    /// Overlapping pixel count per organ code.
    pub overlap_counts: [u32; ORGAN_COUNT],
    /// Organ confidence summed over the overlapping pixels, per organ code.
    pub overlap_confidence: [f64; ORGAN_COUNT],
}

impl Nodule {
    pub fn unassigned(id: usize) -> Self {
        Self {
            id,
            pixels: Vec::new(),
            assigned_organ: None,
            overlap_counts: [0; ORGAN_COUNT],
            overlap_confidence: [0.0; ORGAN_COUNT],
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.pixels.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameAssessment {
    pub frame_index: u64,
    pub station_positive: StationVector,
    pub nodules: Vec<Nodule>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoAssessment {
    pub video_id: String,
    pub station_positive: StationVector,
    pub fs: FagottiScore,
    pub its: Indication,
    pub frames_used: usize,
    pub frames: Vec<FrameAssessment>,
}

pub fn classify_frame(
    frame: &ConfidenceFrame,
    constants: &ScoringConstants,
) -> Result<FrameAssessment, PipelineError> {
    frame.validate()?;
    let organ_masks = threshold_organ_masks(frame, constants)?;
    let pc_mask = threshold_pc_mask(frame, constants)?;
    let mut nodules = connected_components(&pc_mask, constants.connectivity);
    if constants.min_nodule_pixels > 1 {
        nodules.retain(|n| n.size() >= constants.min_nodule_pixels);
        for (i, n) in nodules.iter_mut().enumerate() {
            n.id = i;
        }
    }
    assign_nodules(&mut nodules, &organ_masks, &frame.organ_conf)?;
    Ok(FrameAssessment {
        frame_index: frame.frame_index,
        station_positive: stations_hit(&nodules),
        nodules,
    })
}

/// Stations that received at least one assigned nodule.
pub fn stations_hit(nodules: &[Nodule]) -> StationVector {
    let mut v = [false; STATION_COUNT];
    for organ in nodules.iter().filter_map(|n| n.assigned_organ) {
        v[station_of(organ) as usize] = true;
    }
    v
}

/// Per-station OR across frames.
pub fn aggregate_video(frames: &[FrameAssessment]) -> Result<StationVector, PipelineError> {
    if frames.is_empty() {
        return Err(PipelineError::NoAssessableFrames);
    }
    let mut v = [false; STATION_COUNT];
    for f in frames {
        for (acc, &p) in v.iter_mut().zip(&f.station_positive) {
            *acc |= p;
        }
    }
    Ok(v)
}

/// Aggregates already-classified frames into a video verdict.
pub fn assess_video(
    video_id: &str,
    frames: Vec<FrameAssessment>,
    constants: &ScoringConstants,
) -> Result<VideoAssessment, PipelineError> {
    let station_positive = aggregate_video(&frames)?;
    let fs = compute_fs(&station_positive, constants);
    Ok(VideoAssessment {
        video_id: video_id.into(),
        station_positive,
        fs,
        its: compute_its(fs, constants),
        frames_used: frames.len(),
        frames,
    })
}

/// The full chain over in-memory frames.
pub fn score_frames(
    video_id: &str,
    frames: &[ConfidenceFrame],
    constants: &ScoringConstants,
) -> Result<VideoAssessment, PipelineError> {
    let assessed = filter_roi_frames(frames, constants.roi_threshold)
        .into_iter()
        .map(|f| classify_frame(f, constants))
        .collect::<Result<Vec<_>, _>>()?;
    assess_video(video_id, assessed, constants)
}
