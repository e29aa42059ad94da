//! The `MSK1` raster container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//!      0     4  magic "MSK1"
//!      4     4  width  (u32)
//!      8     4  height (u32)
//!     12     1  channels (u8)
//!     13     1  dtype (0 = u8 label, 1 = f32 confidence)
//!     14     *  payload, channel-planar, each plane row-major
//! ```
//!
//! Label values are 0 (background) or an organ label 1..=8; confidences lie
//! in `[0, 1]`. Both codec directions reject violations instead of clamping.

use alloc::vec::Vec;

pub const MAGIC: [u8; 4] = *b"MSK1";
pub const HEADER_LEN: usize = 14;
pub const MAX_LABEL: u8 = 8;

pub const DTYPE_LABEL: u8 = 0;
pub const DTYPE_CONFIDENCE: u8 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RasterError {
    #[error("bad magic {0:?}, expected \"MSK1\"")]
    BadMagic([u8; 4]),
    #[error("unknown dtype code {0}")]
    UnknownDtype(u8),
    #[error("truncated header: {0} bytes")]
    TruncatedHeader(usize),
    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error("{extra} trailing bytes after payload")]
    TrailingBytes { extra: usize },
    #[error("payload holds {actual} values, header implies {expected}")]
    PayloadLength { expected: usize, actual: usize },
    #[error("confidence {value} at index {index} outside [0, 1]")]
    ConfidenceOutOfRange { index: usize, value: f32 },
    #[error("label {value} at index {index} outside 0..=8")]
    LabelOutOfRange { index: usize, value: u8 },
    #[error("raster dimensions overflow")]
    TooLarge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RasterData {
    Label(Vec<u8>),
    Confidence(Vec<f32>),
}

impl RasterData {
    pub fn dtype(&self) -> u8 {
        match self {
            RasterData::Label(_) => DTYPE_LABEL,
            RasterData::Confidence(_) => DTYPE_CONFIDENCE,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            RasterData::Label(v) => v.len(),
            RasterData::Confidence(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A multi-channel image in the `MSK1` layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub channels: u8,
    pub data: RasterData,
}

fn dtype_size(dtype: u8) -> Option<usize> {
    match dtype {
        DTYPE_LABEL => Some(1),
        DTYPE_CONFIDENCE => Some(4),
        _ => None,
    }
}

fn value_count(width: u32, height: u32, channels: u8) -> Result<usize, RasterError> {
    (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(channels as usize))
        .ok_or(RasterError::TooLarge)
}

impl Raster {
    pub fn confidence(
        width: u32,
        height: u32,
        channels: u8,
        values: Vec<f32>,
    ) -> Result<Self, RasterError> {
        let r = Self {
            width,
            height,
            channels,
            data: RasterData::Confidence(values),
        };
        r.validate()?;
        Ok(r)
    }

    pub fn label(
        width: u32,
        height: u32,
        channels: u8,
        values: Vec<u8>,
    ) -> Result<Self, RasterError> {
        let r = Self {
            width,
            height,
            channels,
            data: RasterData::Label(values),
        };
        r.validate()?;
        Ok(r)
    }

    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn validate(&self) -> Result<(), RasterError> {
        let expected = value_count(self.width, self.height, self.channels)?;
        if self.data.len() != expected {
            return Err(RasterError::PayloadLength {
                expected,
                actual: self.data.len(),
            });
        }
        match &self.data {
            RasterData::Label(v) => check_labels(v),
            RasterData::Confidence(v) => check_confidences(v),
        }
    }

    /// One channel of a confidence raster.
    pub fn confidence_plane(&self, channel: usize) -> Option<&[f32]> {
        let n = self.pixel_count();
        match &self.data {
            RasterData::Confidence(v) if channel < self.channels as usize => {
                Some(&v[channel * n..(channel + 1) * n])
            }
            _ => None,
        }
    }

    /// One channel of a label raster.
    pub fn label_plane(&self, channel: usize) -> Option<&[u8]> {
        let n = self.pixel_count();
        match &self.data {
            RasterData::Label(v) if channel < self.channels as usize => {
                Some(&v[channel * n..(channel + 1) * n])
            }
            _ => None,
        }
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.data.len() * dtype_size(self.data.dtype()).unwrap_or(0)
    }

    /// Serializes the raster. Invalid rasters are rejected and nothing is
    /// produced.
    pub fn encode(&self) -> Result<Vec<u8>, RasterError> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.push(self.channels);
        out.push(self.data.dtype());
        match &self.data {
            RasterData::Label(v) => out.extend_from_slice(v),
            RasterData::Confidence(v) => {
                for x in v {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, RasterError> {
        if bytes.len() < HEADER_LEN {
            // Check what magic we can before complaining about length.
            if bytes.len() >= 4 && bytes[..4] != MAGIC {
                return Err(RasterError::BadMagic(bytes[..4].try_into().unwrap()));
            }
            return Err(RasterError::TruncatedHeader(bytes.len()));
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(RasterError::BadMagic(magic));
        }
        let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let channels = bytes[12];
        let dtype = bytes[13];
        let size = dtype_size(dtype).ok_or(RasterError::UnknownDtype(dtype))?;
        let count = value_count(width, height, channels)?;
        let expected = count.checked_mul(size).ok_or(RasterError::TooLarge)?;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() < expected {
            return Err(RasterError::TruncatedPayload {
                expected,
                actual: payload.len(),
            });
        }
        if payload.len() > expected {
            return Err(RasterError::TrailingBytes {
                extra: payload.len() - expected,
            });
        }
        let data = match dtype {
            DTYPE_LABEL => {
                check_labels(payload)?;
                RasterData::Label(payload.to_vec())
            }
            _ => {
                let values: Vec<f32> = payload
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                    .collect();
                check_confidences(&values)?;
                RasterData::Confidence(values)
            }
        };
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }
}

fn check_labels(values: &[u8]) -> Result<(), RasterError> {
    match values.iter().position(|&v| v > MAX_LABEL) {
        Some(index) => Err(RasterError::LabelOutOfRange {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

fn check_confidences(values: &[f32]) -> Result<(), RasterError> {
    // NaN fails the range test too.
    match values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(index) => Err(RasterError::ConfidenceOutOfRange {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}
