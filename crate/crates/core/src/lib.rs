//! Video-level Fagotti score (FS) estimation from frame-level segmentation
//! confidences.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * the anatomical vocabulary ([`OrganClass`], [`Station`]) and the scoring
//!   constants,
//! * the `MSK1` raster container as a pure byte codec ([`raster`]),
//! * the inference chain from confidence maps to an [`Indication`]
//!   ([`pipeline`]),
//! * evaluation metrics and run/cohort aggregation ([`metrics`],
//!   [`evaluation`]),
//! * FS-stratified video-level k-fold splitting ([`split`]),
//! * a seeded synthetic cohort generator with a planting log ([`synth`]).
//!
//! File IO, JSON formats and the command-line driver live in the `carcino`
//! crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod anatomy;
pub mod constants;
pub mod evaluation;
pub mod frame;
pub mod metrics;
pub mod pipeline;
pub mod raster;
pub mod score;
pub mod split;
pub mod synth;

pub use anatomy::{station_of, OrganClass, Station, ORGAN_COUNT, STATION_COUNT};
pub use constants::{Connectivity, ConstantsError, ScoringConstants};
pub use frame::{BinaryMask, ConfidenceFrame, FrameError};
pub use pipeline::{
    FrameAssessment, Nodule, PipelineError, StationVector, VideoAssessment,
};
pub use raster::{Raster, RasterData, RasterError};
pub use score::{compute_fs, compute_its, FagottiScore, Indication};
