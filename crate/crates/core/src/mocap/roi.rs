use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MocapError, SwingClip, RACQUET_MARKERS};

/// Action-zone durations observed in practice; others are accepted with a warning.
pub const TYPICAL_ROI_FRAMES: RangeInclusive<usize> = 7..=13;

/// An inclusive frame window inside a clip.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiSpec {
    pub clip_id: String,
    pub start_frame: usize,
    pub end_frame: usize,
}

impl RoiSpec {
    pub fn new(clip_id: impl Into<String>, start_frame: usize, end_frame: usize) -> Self {
        RoiSpec {
            clip_id: clip_id.into(),
            start_frame,
            end_frame,
        }
    }

    pub fn duration(&self) -> usize {
        self.end_frame.saturating_sub(self.start_frame) + 1
    }

    pub fn is_typical_duration(&self) -> bool {
        TYPICAL_ROI_FRAMES.contains(&self.duration())
    }

    pub fn check_bounds(&self, frame_count: usize) -> Result<(), MocapError> {
        if self.start_frame > self.end_frame || self.end_frame >= frame_count {
            return Err(MocapError::RoiOutOfBounds {
                clip_id: self.clip_id.clone(),
                start: self.start_frame,
                end: self.end_frame,
                frames: frame_count,
            });
        }
        Ok(())
    }
}

/// Cuts the ROI out of a clip.
///
/// The racquet triad must be complete over the whole window; the error lists
/// every frame (clip-absolute) where any of R1, R2 or H is missing.
pub fn slice_roi(clip: &SwingClip, roi: &RoiSpec) -> Result<SwingClip, MocapError> {
    if roi.clip_id != clip.clip_id() {
        return Err(MocapError::RoiClipMismatch {
            roi: roi.clip_id.clone(),
            clip: clip.clip_id().to_owned(),
        });
    }
    roi.check_bounds(clip.frame_count())?;
    if !roi.is_typical_duration() {
        log::warn!(
            "clip {}: ROI lasts {} frames, outside the usual {}..={}",
            clip.clip_id(),
            roi.duration(),
            TYPICAL_ROI_FRAMES.start(),
            TYPICAL_ROI_FRAMES.end()
        );
    }

    let mut racquet = Vec::with_capacity(3);
    for name in RACQUET_MARKERS {
        racquet.push(clip.marker_index(name).ok_or_else(|| MocapError::MissingMarker {
            clip_id: clip.clip_id().to_owned(),
            marker: name.to_owned(),
        })?);
    }
    let missing: Vec<usize> = (roi.start_frame..=roi.end_frame)
        .filter(|&t| {
            racquet
                .iter()
                .any(|&m| clip.frames()[t][m].iter().any(|v| v.is_nan()))
        })
        .collect();
    if !missing.is_empty() {
        return Err(MocapError::MissingRacquetSamples {
            clip_id: clip.clip_id().to_owned(),
            frames: missing,
        });
    }
    Ok(clip.sub_clip(roi.start_frame, roi.end_frame))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RoiFile {
    One(RoiSpec),
    Many(Vec<RoiSpec>),
}

/// Parses ROI JSON: a single object or an array of objects.
pub fn parse_rois(text: &str) -> Result<Vec<RoiSpec>, MocapError> {
    Ok(match serde_json::from_str::<RoiFile>(text)? {
        RoiFile::One(r) => vec![r],
        RoiFile::Many(v) => v,
    })
}

pub fn load_rois(path: &Path) -> Result<Vec<RoiSpec>, MocapError> {
    let text = std::fs::read_to_string(path).map_err(|e| MocapError::io(path, e))?;
    parse_rois(&text)
}

/// Canonical single-ROI JSON (pretty, trailing newline).
pub fn write_roi<W: Write>(roi: &RoiSpec, mut out: W) -> Result<(), MocapError> {
    serde_json::to_writer_pretty(&mut out, roi)?;
    out.write_all(b"\n").map_err(|e| MocapError::io("<roi writer>", e))
}

pub fn write_rois<W: Write>(rois: &[RoiSpec], mut out: W) -> Result<(), MocapError> {
    serde_json::to_writer_pretty(&mut out, rois)?;
    out.write_all(b"\n").map_err(|e| MocapError::io("<roi writer>", e))
}
