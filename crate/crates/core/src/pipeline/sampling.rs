//! ROI frame selection and fixed-interval sampling inside ROI segments.

use alloc::vec::Vec;

use super::PipelineError;
use crate::frame::ConfidenceFrame;

/// Timestamps `start, start + interval, ...` (never past `end`) for each
/// segment, concatenated in segment order.
///
/// Segments are closed intervals and must not intersect, including at a
/// shared endpoint, since that timestamp would be sampled twice.
pub fn sample_frame_times(
    segments: &[(f64, f64)],
    interval: f64,
) -> Result<Vec<f64>, PipelineError> {
    if !(interval > 0.0 && interval.is_finite()) {
        return Err(PipelineError::NegativeInterval(interval));
    }
    for (i, &(start, end)) in segments.iter().enumerate() {
        if !start.is_finite() || !end.is_finite() || start > end {
            return Err(PipelineError::InvalidSegment { start, end });
        }
        for &(s2, e2) in &segments[..i] {
            if start <= e2 && s2 <= end {
                return Err(PipelineError::OverlappingSegments {
                    first: (s2, e2),
                    second: (start, end),
                });
            }
        }
    }
    let mut times = Vec::new();
    for &(start, end) in segments {
        // Multiply rather than accumulate so long segments do not drift.
        let mut i = 0u64;
        loop {
            let t = start + i as f64 * interval;
            if t > end {
                break;
            }
            times.push(t);
            i += 1;
        }
    }
    Ok(times)
}

#[inline]
pub fn passes_roi(roi_score: f64, roi_threshold: f64) -> bool {
    roi_score >= roi_threshold
}

/// Frames whose ROI relevance is at least `roi_threshold`, order preserved.
pub fn filter_roi_frames(frames: &[ConfidenceFrame], roi_threshold: f64) -> Vec<&ConfidenceFrame> {
    frames
        .iter()
        .filter(|f| passes_roi(f.roi_score, roi_threshold))
        .collect()
}
