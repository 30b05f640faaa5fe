//! Marker clips, regions of interest and label files.
//!
//! All geometry past ingestion lives in one canonical frame: X forward toward
//! the net, Y lateral, Z vertical up, in metres. Missing samples are `NaN` and
//! are never repaired.

mod clip;
mod convention;
mod labels;
mod roi;

use std::path::PathBuf;

use thiserror::Error;

pub use clip::{parse_clip, parse_clip_str, write_clip, ParseOptions, SwingClip};
pub use convention::{convert_handedness, SourceConvention};
pub use labels::{
    bad_fraction, criteria, labels_for, load_labels, parse_labels, write_labels, Label,
    LabelRecord,
};
pub use roi::{load_rois, parse_rois, slice_roi, write_roi, write_rois, RoiSpec, TYPICAL_ROI_FRAMES};

/// A 3D point or vector in the canonical frame.
pub type Point3 = [f64; 3];

/// The three racquet markers the sweet spot is computed from.
pub const RACQUET_MARKERS: [&str; 3] = ["R1", "R2", "H"];

/// The full-body marker set, racquet triad last.
pub const FULL_BODY_MARKERS: [&str; 22] = [
    "HEAD", "NECK", "STRN", "LSHO", "RSHO", "LELB", "RELB", "LWRI", "RWRI", "RHND", "PELV",
    "LHIP", "RHIP", "LKNE", "RKNE", "LANK", "RANK", "LTOE", "RTOE", "R1", "R2", "H",
];

#[derive(Debug, Error)]
pub enum MocapError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("data row {row}: expected {expected} values, found {found}")]
    RowArity {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("data row {row}, column `{column}`: `{token}` is not a number")]
    NonNumeric {
        row: usize,
        column: String,
        token: String,
    },
    #[error("unknown source convention `{0}` (expected canonical, rh-xyz-zup or lh-xzy)")]
    UnknownConvention(String),
    #[error("invalid clip: {0}")]
    InvalidClip(String),
    #[error("clip {clip_id}: ROI [{start}, {end}] outside 0..{frames}")]
    RoiOutOfBounds {
        clip_id: String,
        start: usize,
        end: usize,
        frames: usize,
    },
    #[error("ROI targets clip `{roi}` but was applied to `{clip}`")]
    RoiClipMismatch { roi: String, clip: String },
    #[error("clip {clip_id}: missing marker `{marker}`")]
    MissingMarker { clip_id: String, marker: String },
    #[error("clip {clip_id}: missing racquet samples at frames {frames:?}")]
    MissingRacquetSamples { clip_id: String, frames: Vec<usize> },
    #[error("duplicate label for ({clip_id}, {criterion})")]
    DuplicateLabel { clip_id: String, criterion: String },
    #[error("label row {row}: `{value}` is not one of good, bad")]
    InvalidLabel { row: usize, value: String },
}

impl MocapError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MocapError::Io {
            path: path.into(),
            source,
        }
    }
}
