//! Per-frame inputs: the segmenter's confidence maps plus optional ground truth.

use alloc::vec;
use alloc::vec::Vec;

use crate::anatomy::ORGAN_COUNT;
use crate::raster::{Raster, RasterData};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("{what}: expected {expected} channels, found {actual}")]
    ChannelCountMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{what}: {actual_w}x{actual_h} does not match frame size {expected_w}x{expected_h}")]
    DimensionMismatch {
        what: &'static str,
        expected_w: u32,
        expected_h: u32,
        actual_w: u32,
        actual_h: u32,
    },
    #[error("{what}: expected a {expected} raster")]
    WrongDtype {
        what: &'static str,
        expected: &'static str,
    },
    #[error("ground-truth PC raster must be binary, found {0}")]
    NonBinaryPc(u8),
}

/// A row-major boolean plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    /// Returns `None` when `bits.len() != width * height`.
    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Option<Self> {
        (bits.len() == width as usize * height as usize).then_some(Self {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for row in 0..height {
            for col in 0..width {
                bits.push(f(row, col));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: u32, col: u32) -> bool {
        self.bits[row as usize * self.width as usize + col as usize]
    }

    #[inline]
    pub fn set(&mut self, row: u32, col: u32, value: bool) {
        self.bits[row as usize * self.width as usize + col as usize] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn same_size(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Every set bit of `self` is also set in `other`. Sizes must match.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.same_size(other)
            && self
                .bits
                .iter()
                .zip(&other.bits)
                .all(|(&a, &b)| !a || b)
    }

    pub fn intersection_count(&self, other: &BinaryMask) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(&a, &b)| a && b)
            .count()
    }

    /// Set pixels as `(row, col)` in row-major order.
    pub fn iter_set(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width as usize;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i / w) as u32, (i % w) as u32))
    }
}

/// Everything known about one sampled video frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceFrame {
    pub frame_index: u64,
    pub time_s: f64,
    /// Eight confidence channels in organ code order.
    pub organ_conf: Raster,
    /// One PC confidence channel.
    pub pc_conf: Raster,
    /// ROI discriminator relevance in `[0, 1]`.
    pub roi_score: f64,
    /// Label raster, 0 = background, organ code + 1 otherwise.
    pub gt_labels: Option<Raster>,
    /// Binary PC reference mask.
    pub gt_pc: Option<Raster>,
    pub gt_roi: Option<bool>,
}

impl ConfidenceFrame {
    #[inline]
    pub fn width(&self) -> u32 {
        self.pc_conf.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.pc_conf.height
    }

    /// Checks channel counts, dtypes and that every raster shares one size.
    pub fn validate(&self) -> Result<(), FrameError> {
        check_conf("organ_conf", &self.organ_conf, ORGAN_COUNT)?;
        check_conf("pc_conf", &self.pc_conf, 1)?;
        let (w, h) = (self.width(), self.height());
        same_dims("organ_conf", &self.organ_conf, w, h)?;
        if let Some(gt) = &self.gt_labels {
            check_label("gt_labels", gt)?;
            same_dims("gt_labels", gt, w, h)?;
        }
        if let Some(gt) = &self.gt_pc {
            check_label("gt_pc", gt)?;
            same_dims("gt_pc", gt, w, h)?;
            if let RasterData::Label(v) = &gt.data {
                if let Some(&bad) = v.iter().find(|&&x| x > 1) {
                    return Err(FrameError::NonBinaryPc(bad));
                }
            }
        }
        Ok(())
    }
}

fn check_conf(what: &'static str, r: &Raster, channels: usize) -> Result<(), FrameError> {
    if !matches!(r.data, RasterData::Confidence(_)) {
        return Err(FrameError::WrongDtype {
            what,
            expected: "confidence",
        });
    }
    if r.channels as usize != channels {
        return Err(FrameError::ChannelCountMismatch {
            what,
            expected: channels,
            actual: r.channels as usize,
        });
    }
    Ok(())
}

fn check_label(what: &'static str, r: &Raster) -> Result<(), FrameError> {
    if !matches!(r.data, RasterData::Label(_)) {
        return Err(FrameError::WrongDtype {
            what,
            expected: "label",
        });
    }
    if r.channels != 1 {
        return Err(FrameError::ChannelCountMismatch {
            what,
            expected: 1,
            actual: r.channels as usize,
        });
    }
    Ok(())
}

fn same_dims(what: &'static str, r: &Raster, w: u32, h: u32) -> Result<(), FrameError> {
    if r.width != w || r.height != h {
        return Err(FrameError::DimensionMismatch {
            what,
            expected_w: w,
            expected_h: h,
            actual_w: r.width,
            actual_h: r.height,
        });
    }
    Ok(())
}
