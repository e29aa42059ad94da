use std::io;
use std::path::PathBuf;

use carcino_core::evaluation::EvaluationError;
use carcino_core::split::SplitError;
use carcino_core::synth::SynthError;
use carcino_core::{ConstantsError, PipelineError, RasterError};

use crate::maskio::ManifestError;

/// Process exit codes. Stable; scripts may rely on them.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const NO_ASSESSABLE_FRAMES: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Raster { path: PathBuf, source: RasterError },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Manifest { path: PathBuf, source: ManifestError },
    #[error("video `{video_id}`: no frame passed the ROI filter")]
    NoAssessableFrames { video_id: String },
    #[error("video `{video_id}`: {source}")]
    Pipeline { video_id: String, source: PipelineError },
    #[error("invalid constants: {0}")]
    Constants(#[from] ConstantsError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error("{0}")]
    Validation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Raster { .. } => exit::IO,
            Error::NoAssessableFrames { .. } => exit::NO_ASSESSABLE_FRAMES,
            _ => exit::VALIDATION,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn pipeline(video_id: &str, source: PipelineError) -> Self {
        match source {
            PipelineError::NoAssessableFrames => Error::NoAssessableFrames {
                video_id: video_id.into(),
            },
            source => Error::Pipeline {
                video_id: video_id.into(),
                source,
            },
        }
    }
}
