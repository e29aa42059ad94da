//! Confidence map binarization. Every comparison is `>=`.

use super::PipelineError;
use crate::anatomy::ORGAN_COUNT;
use crate::constants::ScoringConstants;
use crate::frame::{BinaryMask, ConfidenceFrame};
use crate::raster::Raster;

pub fn threshold_plane(plane: &[f32], width: u32, height: u32, threshold: f32) -> BinaryMask {
    let bits = plane.iter().map(|&v| v >= threshold).collect();
    BinaryMask::from_bits(width, height, bits).expect("plane length matches raster size")
}

/// Binarizes channel `channel` of a confidence raster.
pub fn threshold_channel(
    raster: &Raster,
    channel: usize,
    threshold: f32,
) -> Result<BinaryMask, PipelineError> {
    let plane = raster
        .confidence_plane(channel)
        .ok_or(PipelineError::ChannelCountMismatch {
            expected: channel + 1,
            actual: raster.channels as usize,
        })?;
    Ok(threshold_plane(plane, raster.width, raster.height, threshold))
}

pub fn threshold_organ_masks(
    frame: &ConfidenceFrame,
    constants: &ScoringConstants,
) -> Result<[BinaryMask; ORGAN_COUNT], PipelineError> {
    let conf = &frame.organ_conf;
    if conf.channels as usize != ORGAN_COUNT || conf.confidence_plane(0).is_none() {
        return Err(PipelineError::ChannelCountMismatch {
            expected: ORGAN_COUNT,
            actual: conf.channels as usize,
        });
    }
    let t = constants.organ_confidence_threshold;
    let masks: [BinaryMask; ORGAN_COUNT] = core::array::from_fn(|c| {
        threshold_plane(conf.confidence_plane(c).unwrap(), conf.width, conf.height, t)
    });
    Ok(masks)
}

pub fn threshold_pc_mask(
    frame: &ConfidenceFrame,
    constants: &ScoringConstants,
) -> Result<BinaryMask, PipelineError> {
    if frame.pc_conf.channels != 1 {
        return Err(PipelineError::ChannelCountMismatch {
            expected: 1,
            actual: frame.pc_conf.channels as usize,
        });
    }
    threshold_channel(&frame.pc_conf, 0, constants.pc_confidence_threshold)
}
