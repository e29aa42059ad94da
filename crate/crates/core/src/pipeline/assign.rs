//! Nodule-to-organ assignment.
//!
//! A nodule goes to the organ whose thresholded mask covers most of its
//! pixels. Equal pixel overlaps are resolved by the larger summed organ
//! confidence over the overlapping pixels, then by the lower organ code.
//! A nodule that touches no organ mask stays unassigned.

use super::{Nodule, PipelineError};
use crate::anatomy::{OrganClass, ORGAN_COUNT};
use crate::frame::BinaryMask;
use crate::raster::Raster;

pub fn assign_nodules(
    nodules: &mut [Nodule],
    organ_masks: &[BinaryMask; ORGAN_COUNT],
    organ_conf: &Raster,
) -> Result<(), PipelineError> {
    let (w, h) = (organ_conf.width, organ_conf.height);
    if organ_conf.channels as usize != ORGAN_COUNT || organ_conf.confidence_plane(0).is_none() {
        return Err(PipelineError::ChannelCountMismatch {
            expected: ORGAN_COUNT,
            actual: organ_conf.channels as usize,
        });
    }
    if let Some(m) = organ_masks.iter().find(|m| m.width() != w || m.height() != h) {
        return Err(PipelineError::DimensionMismatch {
            expected: (w, h),
            actual: (m.width(), m.height()),
        });
    }
    if let Some(&(r, c)) = nodules
        .iter()
        .flat_map(|n| n.pixels.iter())
        .find(|&&(r, c)| r >= h || c >= w)
    {
        return Err(PipelineError::DimensionMismatch {
            expected: (w, h),
            actual: (c + 1, r + 1),
        });
    }

    for nodule in nodules.iter_mut() {
        let mut counts = [0u32; ORGAN_COUNT];
        let mut sums = [0f64; ORGAN_COUNT];
        for (organ, mask) in organ_masks.iter().enumerate() {
            let plane = organ_conf.confidence_plane(organ).unwrap();
            for &(r, c) in &nodule.pixels {
                if mask.get(r, c) {
                    counts[organ] += 1;
                    sums[organ] += plane[(r * w + c) as usize] as f64;
                }
            }
        }
        let mut best: Option<usize> = None;
        for organ in 0..ORGAN_COUNT {
            if counts[organ] == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => {
                    counts[organ] > counts[b] || (counts[organ] == counts[b] && sums[organ] > sums[b])
                }
            };
            if better {
                best = Some(organ);
            }
        }
        nodule.overlap_counts = counts;
        nodule.overlap_confidence = sums;
        nodule.assigned_organ = best.and_then(|o| OrganClass::from_code(o as u8));
    }
    Ok(())
}
