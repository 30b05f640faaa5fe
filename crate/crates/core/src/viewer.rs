//! JSON bundles for the replay/labelling UI.
//!
//! A bundle carries the clip (missing samples as `null`), stick-figure
//! connectivity restricted to markers the clip has, the ROI, the labels
//! recorded for the clip and optionally the sweet-spot overlay. Overlay
//! arrows run from `positions[i]` to `tips[i]`; frame `i` of the overlay is
//! clip frame `start_frame + i`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mocap::{LabelRecord, Point3, RoiSpec, SwingClip};
use crate::pipeline::SwingKinematics;

pub const BUNDLE_FORMAT: &str = "swingflow-viewer";
pub const BUNDLE_VERSION: u32 = 1;

/// Stick-figure segments over the full-body marker set.
pub const STICK_SEGMENTS: [(&str, &str); 24] = [
    ("HEAD", "NECK"),
    ("NECK", "STRN"),
    ("NECK", "LSHO"),
    ("NECK", "RSHO"),
    ("LSHO", "LELB"),
    ("LELB", "LWRI"),
    ("RSHO", "RELB"),
    ("RELB", "RWRI"),
    ("RWRI", "RHND"),
    ("STRN", "PELV"),
    ("PELV", "LHIP"),
    ("PELV", "RHIP"),
    ("LHIP", "RHIP"),
    ("LHIP", "LKNE"),
    ("LKNE", "LANK"),
    ("LANK", "LTOE"),
    ("RHIP", "RKNE"),
    ("RKNE", "RANK"),
    ("RANK", "RTOE"),
    ("RHND", "H"),
    ("H", "R1"),
    ("H", "R2"),
    ("R1", "R2"),
    ("LSHO", "RSHO"),
];

#[derive(Debug, Error)]
pub enum ViewerError {
    #[error("bundle format `{0}` is not {BUNDLE_FORMAT}")]
    Format(String),
    #[error("unsupported bundle version {0}")]
    Version(u32),
    #[error("segment {0}-{1} references a marker the clip does not have")]
    UnknownMarker(String, String),
    #[error("{0}")]
    Shape(String),
    #[error("bundle json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleClip {
    pub clip_id: String,
    pub sample_rate_hz: f64,
    pub markers: Vec<String>,
    /// `frames[t][m]` is marker `m` at frame `t`; `null` where missing.
    pub frames: Vec<Vec<[Option<f64>; 3]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub start_frame: usize,
    pub positions: Vec<Point3>,
    pub flow: Vec<Point3>,
    pub tips: Vec<Point3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewerBundle {
    pub format: String,
    pub version: u32,
    pub clip: BundleClip,
    pub connectivity: Vec<(String, String)>,
    pub roi: Option<RoiSpec>,
    pub overlay: Option<Overlay>,
    pub labels: Vec<LabelRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<serde_json::Value>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Builds a bundle; labels for other clips are dropped.
pub fn build_bundle(
    clip: &SwingClip,
    roi: Option<&RoiSpec>,
    kinematics: Option<&SwingKinematics>,
    labels: &[LabelRecord],
) -> Result<ViewerBundle, ViewerError> {
    let has = |m: &str| clip.marker_index(m).is_some();
    let connectivity = STICK_SEGMENTS
        .iter()
        .filter(|(a, b)| has(a) && has(b))
        .map(|(a, b)| ((*a).to_owned(), (*b).to_owned()))
        .collect();
    let bundle = ViewerBundle {
        format: BUNDLE_FORMAT.to_owned(),
        version: BUNDLE_VERSION,
        clip: BundleClip {
            clip_id: clip.clip_id().to_owned(),
            sample_rate_hz: clip.sample_rate_hz(),
            markers: clip.markers().to_vec(),
            frames: clip
                .frames()
                .iter()
                .map(|f| f.iter().map(|p| p.map(finite)).collect())
                .collect(),
        },
        connectivity,
        roi: roi.or(kinematics.map(|k| &k.roi)).cloned(),
        overlay: kinematics.map(|k| Overlay {
            start_frame: k.roi.start_frame,
            positions: k.path.positions.clone(),
            flow: k.flow.vectors.clone(),
            tips: k.tips.tips.clone(),
        }),
        labels: labels
            .iter()
            .filter(|l| l.clip_id == clip.clip_id())
            .cloned()
            .collect(),
        provenance: None,
    };
    bundle.validate()?;
    Ok(bundle)
}

impl ViewerBundle {
    pub fn validate(&self) -> Result<(), ViewerError> {
        if self.format != BUNDLE_FORMAT {
            return Err(ViewerError::Format(self.format.clone()));
        }
        if self.version != BUNDLE_VERSION {
            return Err(ViewerError::Version(self.version));
        }
        let markers = &self.clip.markers;
        for (a, b) in &self.connectivity {
            if !markers.contains(a) || !markers.contains(b) {
                return Err(ViewerError::UnknownMarker(a.clone(), b.clone()));
            }
        }
        if let Some(t) = self.clip.frames.iter().position(|f| f.len() != markers.len()) {
            return Err(ViewerError::Shape(format!(
                "frame {t} has {} points for {} markers",
                self.clip.frames[t].len(),
                markers.len()
            )));
        }
        if let Some(o) = &self.overlay {
            let n = o.positions.len();
            if o.flow.len() != n || o.tips.len() != n {
                return Err(ViewerError::Shape("overlay arrays differ in length".to_owned()));
            }
            if o.start_frame + n > self.clip.frames.len() {
                return Err(ViewerError::Shape("overlay runs past the clip".to_owned()));
            }
        }
        if let Some(r) = &self.roi {
            if r.start_frame > r.end_frame || r.end_frame >= self.clip.frames.len() {
                return Err(ViewerError::Shape("roi outside the clip".to_owned()));
            }
        }
        Ok(())
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String, ViewerError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, ViewerError> {
        let b: ViewerBundle = serde_json::from_str(text)?;
        b.validate()?;
        Ok(b)
    }
}
