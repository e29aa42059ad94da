//! Scoring configuration threaded through the whole pipeline.

/// Pixel neighbourhood used when grouping PC pixels into nodules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Connectivity {
    /// Edge neighbours only.
    Four,
    /// Edge and corner neighbours.
    #[default]
    Eight,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstantsError {
    #[error("{name} must lie in (0, 1], got {value}")]
    ThresholdOutOfRange { name: &'static str, value: f64 },
    #[error("{name} must be positive")]
    NotPositive { name: &'static str },
}

/// Thresholds, point values and cut-offs. [`Default`] gives the clinical
/// values; every field may be overridden for sensitivity studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringConstants {
    /// Organ pixels with confidence `>=` this value are kept.
    pub organ_confidence_threshold: f32,
    /// PC pixels with confidence `>=` this value are kept.
    pub pc_confidence_threshold: f32,
    pub points_per_positive_station: u32,
    /// FS at or above this value contraindicates surgery.
    pub its_cutoff: u32,
    /// Seconds between sampled frames inside an ROI segment.
    pub frame_sampling_interval: f64,
    /// Divisor turning an FS RMSE into FS levels.
    pub fs_step: u32,
    /// Frames with ROI relevance `>=` this value are scored.
    pub roi_threshold: f64,
    /// Components smaller than this are dropped before assignment.
    pub min_nodule_pixels: usize,
    pub connectivity: Connectivity,
}

impl Default for ScoringConstants {
    fn default() -> Self {
        Self {
            organ_confidence_threshold: 0.70,
            pc_confidence_threshold: 0.90,
            points_per_positive_station: 2,
            its_cutoff: 8,
            frame_sampling_interval: 5.0,
            fs_step: 2,
            roi_threshold: 0.5,
            min_nodule_pixels: 1,
            connectivity: Connectivity::Eight,
        }
    }
}

impl ScoringConstants {
    pub fn validate(&self) -> Result<(), ConstantsError> {
        let unit = |name: &'static str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(ConstantsError::ThresholdOutOfRange { name, value: v })
            }
        };
        unit(
            "organ_confidence_threshold",
            self.organ_confidence_threshold as f64,
        )?;
        unit("pc_confidence_threshold", self.pc_confidence_threshold as f64)?;
        // 0 is allowed here: it disables ROI filtering.
        if !(0.0..=1.0).contains(&self.roi_threshold) {
            return Err(ConstantsError::ThresholdOutOfRange {
                name: "roi_threshold",
                value: self.roi_threshold,
            });
        }
        let positive = |name: &'static str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(ConstantsError::NotPositive { name })
            }
        };
        positive(
            "points_per_positive_station",
            self.points_per_positive_station > 0,
        )?;
        positive("its_cutoff", self.its_cutoff > 0)?;
        positive("fs_step", self.fs_step > 0)?;
        positive("min_nodule_pixels", self.min_nodule_pixels > 0)?;
        positive(
            "frame_sampling_interval",
            self.frame_sampling_interval > 0.0 && self.frame_sampling_interval.is_finite(),
        )?;
        Ok(())
    }
}
