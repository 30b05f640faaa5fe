//! Labelled synthetic swings with known ground truth.
//!
//! The sweet spot moves forward along X at a constant per-frame speed while
//! its sagittal (X, Z) and transverse (X, Y) projections follow the
//! archetype's quadratics. The racquet triad sits on a circle of radius
//! [`TRIAD_RADIUS`] around the sweet spot, so the triad circumcenter is the
//! generating path exactly. Noise is a per-frame rigid offset of the whole
//! racquet. The 19 body markers are cosmetic filler for the viewer.
//!
//! The preset archetypes encode errors geometrically:
//!
//! | archetype      | perturbs                                             |
//! |----------------|------------------------------------------------------|
//! | topspin-short  | smaller sagittal curvature and speed (f0..f5 scale)  |
//! | flat           | sagittal p2 ≤ 0 (f0, f3), wider transverse slope     |

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::MIN_FIT_FRAMES;
use crate::fsutil::write_atomic;
use crate::kinematics::{add, cross, norm, scale, sub};
use crate::mocap::{
    write_clip, write_labels, write_rois, Label, LabelRecord, MocapError, Point3, RoiSpec,
    SwingClip, FULL_BODY_MARKERS,
};
use crate::seed::{derive_seed, stream_seed};

/// Distance of each racquet marker from the sweet spot, metres.
pub const TRIAD_RADIUS: f64 = 0.18;
/// Angles of R1, R2 and H on the racquet circle, degrees.
pub const TRIAD_ANGLES_DEG: [f64; 3] = [60.0, 120.0, 270.0];
/// Frames recorded before and after the action zone.
pub const LEAD_FRAMES: usize = 3;
pub const FOLLOW_FRAMES: usize = 3;
pub const SAMPLE_RATE_HZ: f64 = 50.0;

pub const MANIFEST_FORMAT: &str = "swingflow-synth";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid archetype `{name}`: {reason}")]
    InvalidArchetype { name: String, reason: String },
    #[error("archetype `{0}` has count 0")]
    ZeroCount(String),
    #[error("dataset spec is empty")]
    EmptySpec,
    #[error(transparent)]
    Mocap(#[from] MocapError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwingArchetype {
    pub name: String,
    pub duration_frames: usize,
    /// Z as a quadratic in X: (p2, p1, p0).
    pub sagittal: [f64; 3],
    /// Y as a quadratic in X: (p2, p1, p0).
    pub transverse: [f64; 3],
    /// Forward travel per frame, metres.
    pub speed_scale: f64,
    /// Half-width of the uniform per-axis racquet offset, metres.
    pub noise_amplitude: f64,
    /// Half-width of the uniform per-instance coefficient perturbation.
    #[serde(default)]
    pub coefficient_jitter: f64,
    pub labels: BTreeMap<String, Label>,
}

impl SwingArchetype {
    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |reason: String| {
            Err(SynthError::InvalidArchetype {
                name: self.name.clone(),
                reason,
            })
        };
        if self.duration_frames < MIN_FIT_FRAMES {
            return fail(format!(
                "duration {} is below {MIN_FIT_FRAMES} frames",
                self.duration_frames
            ));
        }
        if !(self.speed_scale.is_finite() && self.speed_scale > 0.0) {
            return fail(format!("speed scale must be positive, got {}", self.speed_scale));
        }
        if !(self.noise_amplitude.is_finite() && self.noise_amplitude >= 0.0) {
            return fail(format!("noise must be >= 0, got {}", self.noise_amplitude));
        }
        if !(self.coefficient_jitter.is_finite() && self.coefficient_jitter >= 0.0) {
            return fail(format!("jitter must be >= 0, got {}", self.coefficient_jitter));
        }
        if self.sagittal.iter().chain(&self.transverse).any(|c| !c.is_finite()) {
            return fail("non-finite coefficient".to_owned());
        }
        Ok(())
    }

    fn labelled(novice: Label, intermediate: Label) -> BTreeMap<String, Label> {
        BTreeMap::from([
            ("novice".to_owned(), novice),
            ("intermediate".to_owned(), intermediate),
        ])
    }

    /// Long, rising stroke; good under both criteria.
    pub fn topspin_full() -> Self {
        SwingArchetype {
            name: "topspin-full".to_owned(),
            duration_frames: 11,
            sagittal: [0.45, 0.35, 1.0],
            transverse: [-0.30, 0.10, 0.55],
            speed_scale: 0.16,
            noise_amplitude: 0.002,
            coefficient_jitter: 0.03,
            labels: Self::labelled(Label::Good, Label::Good),
        }
    }

    /// Truncated, slower stroke; acceptable for a novice only.
    pub fn topspin_short() -> Self {
        SwingArchetype {
            name: "topspin-short".to_owned(),
            duration_frames: 8,
            sagittal: [0.30, 0.20, 0.95],
            transverse: [-0.45, 0.05, 0.50],
            speed_scale: 0.10,
            noise_amplitude: 0.002,
            coefficient_jitter: 0.03,
            labels: Self::labelled(Label::Good, Label::Bad),
        }
    }

    /// Flat or descending string-bed path; bad under both criteria.
    pub fn flat() -> Self {
        SwingArchetype {
            name: "flat".to_owned(),
            duration_frames: 10,
            sagittal: [-0.10, 0.02, 0.90],
            transverse: [-0.15, 0.20, 0.60],
            speed_scale: 0.14,
            noise_amplitude: 0.002,
            coefficient_jitter: 0.03,
            labels: Self::labelled(Label::Bad, Label::Bad),
        }
    }
}

/// The 14-swing preset: 28.6% bad under `novice`, 71.4% bad under `intermediate`.
pub fn default_preset() -> Vec<(SwingArchetype, usize)> {
    vec![
        (SwingArchetype::topspin_full(), 4),
        (SwingArchetype::topspin_short(), 6),
        (SwingArchetype::flat(), 4),
    ]
}

/// One generated swing and the coefficients actually used for it.
#[derive(Debug, Clone)]
pub struct GeneratedSwing {
    pub archetype: String,
    pub seed: u64,
    pub sagittal: [f64; 3],
    pub transverse: [f64; 3],
    pub clip: SwingClip,
    pub roi: RoiSpec,
    pub labels: Vec<LabelRecord>,
}

fn quad(c: [f64; 3], x: f64) -> f64 {
    (c[0] * x + c[1]) * x + c[2]
}

fn rotate_z([x, y, z]: Point3, angle: f64) -> Point3 {
    let (s, c) = angle.sin_cos();
    [c * x - s * y, s * x + c * y, z]
}

/// Standing-figure offsets (forward, lateral, up) relative to the feet centre.
const BODY_OFFSETS: [(&str, Point3); 16] = [
    ("HEAD", [0.0, 0.0, 1.70]),
    ("NECK", [0.0, 0.0, 1.50]),
    ("STRN", [0.05, 0.0, 1.35]),
    ("LSHO", [0.0, -0.20, 1.45]),
    ("RSHO", [0.0, 0.20, 1.45]),
    ("LELB", [0.05, -0.30, 1.20]),
    ("LWRI", [0.20, -0.30, 1.05]),
    ("PELV", [0.0, 0.0, 0.95]),
    ("LHIP", [0.0, -0.12, 0.92]),
    ("RHIP", [0.0, 0.12, 0.92]),
    ("LKNE", [0.10, -0.15, 0.50]),
    ("RKNE", [0.0, 0.15, 0.50]),
    ("LANK", [0.05, -0.18, 0.08]),
    ("RANK", [-0.10, 0.18, 0.08]),
    ("LTOE", [0.20, -0.18, 0.02]),
    ("RTOE", [0.05, 0.20, 0.02]),
];

fn body_frame(root: Point3, trunk: f64, triad: [Point3; 3], centre: Point3) -> BTreeMap<&'static str, Point3> {
    let mut m: BTreeMap<&str, Point3> = BODY_OFFSETS
        .iter()
        .map(|(name, off)| (*name, add(root, rotate_z(*off, trunk))))
        .collect();
    let h = triad[2];
    let grip = sub(h, centre);
    let grip = scale(grip, 1.0 / norm(grip));
    let hand = add(h, scale(grip, 0.04));
    let wrist = add(hand, scale(grip, 0.06));
    let shoulder = m["RSHO"];
    let elbow = add(scale(add(shoulder, wrist), 0.5), [0.0, 0.0, -0.12]);
    m.insert("RHND", hand);
    m.insert("RWRI", wrist);
    m.insert("RELB", elbow);
    m.insert("R1", triad[0]);
    m.insert("R2", triad[1]);
    m.insert("H", h);
    m
}

/// Generates one clip of `LEAD + duration + FOLLOW` frames with its ROI and labels.
pub fn generate_swing(
    archetype: &SwingArchetype,
    clip_id: &str,
    seed: u64,
) -> Result<GeneratedSwing, SynthError> {
    archetype.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let j = archetype.coefficient_jitter;
    let mut jitter = |c: [f64; 3]| {
        if j == 0.0 {
            c
        } else {
            c.map(|v| v + rng.gen_range(-j..=j))
        }
    };
    let sagittal = jitter(archetype.sagittal);
    let transverse = jitter(archetype.transverse);

    // racquet face roughly toward the net, slowly rolling through the stroke
    let yaw = rng.gen_range(-0.2..0.2);
    let tilt = rng.gen_range(-0.2..0.2);
    let roll_rate = rng.gen_range(-0.05..0.05);
    let u = [-f64::sin(yaw), f64::cos(yaw), 0.0];
    let v = [
        f64::cos(yaw) * f64::sin(tilt),
        f64::sin(yaw) * f64::sin(tilt),
        f64::cos(tilt),
    ];
    debug_assert!(norm(cross(u, v)) > 0.99);

    let d = archetype.duration_frames;
    let total = LEAD_FRAMES + d + FOLLOW_FRAMES;
    let mid = (d as f64 - 1.0) / 2.0;
    let root = [-0.35, quad(transverse, 0.0) - 0.65, 0.0];
    let a = archetype.noise_amplitude;

    let mut frames = Vec::with_capacity(total);
    for k in 0..total {
        let t = k as f64 - LEAD_FRAMES as f64;
        let x = archetype.speed_scale * (t - mid);
        let mut centre = [x, quad(transverse, x), quad(sagittal, x)];
        if a > 0.0 {
            let offset = [
                rng.gen_range(-a..=a),
                rng.gen_range(-a..=a),
                rng.gen_range(-a..=a),
            ];
            centre = add(centre, offset);
        }
        let roll = roll_rate * t;
        let triad = TRIAD_ANGLES_DEG.map(|deg| {
            let th = deg * PI / 180.0 + roll;
            add(
                centre,
                add(scale(u, TRIAD_RADIUS * th.cos()), scale(v, TRIAD_RADIUS * th.sin())),
            )
        });
        let trunk = 0.6 * (t - mid) / (total as f64);
        let body = body_frame(root, trunk, triad, centre);
        frames.push(FULL_BODY_MARKERS.iter().map(|m| body[m]).collect());
    }

    let clip = SwingClip::new(
        clip_id,
        SAMPLE_RATE_HZ,
        FULL_BODY_MARKERS.iter().map(|m| (*m).to_owned()).collect(),
        frames,
    )?;
    let roi = RoiSpec::new(clip_id, LEAD_FRAMES, LEAD_FRAMES + d - 1);
    let labels = archetype
        .labels
        .iter()
        .map(|(criterion, label)| LabelRecord::new(clip_id, criterion.clone(), *label))
        .collect();
    Ok(GeneratedSwing {
        archetype: archetype.name.clone(),
        seed,
        sagittal,
        transverse,
        clip,
        roi,
        labels,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestSwing {
    pub clip_id: String,
    pub archetype: String,
    pub seed: u64,
    pub sagittal: [f64; 3],
    pub transverse: [f64; 3],
    pub clip_file: String,
    pub roi: RoiSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub sample_rate_hz: f64,
    pub files: Vec<String>,
    pub archetypes: Vec<(SwingArchetype, usize)>,
    pub swings: Vec<ManifestSwing>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<serde_json::Value>,
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub swings: Vec<GeneratedSwing>,
    pub manifest: Manifest,
}

pub const ROIS_FILE: &str = "rois.json";
pub const LABELS_FILE: &str = "labels.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CLIPS_DIR: &str = "clips";

/// Generates `count` swings per archetype, ids `s01`, `s02`, … in spec order.
pub fn generate_dataset(
    spec: &[(SwingArchetype, usize)],
    seed: u64,
) -> Result<SyntheticDataset, SynthError> {
    if spec.is_empty() {
        return Err(SynthError::EmptySpec);
    }
    for (a, count) in spec {
        a.validate()?;
        if *count == 0 {
            return Err(SynthError::ZeroCount(a.name.clone()));
        }
    }
    let total: usize = spec.iter().map(|(_, c)| c).sum();
    let width = total.to_string().len().max(2);
    let root = derive_seed(seed, "synth");
    let mut swings = Vec::with_capacity(total);
    for (a, count) in spec {
        for _ in 0..*count {
            let i = swings.len();
            let id = format!("s{:0width$}", i + 1);
            swings.push(generate_swing(a, &id, stream_seed(root, i as u64))?);
        }
    }
    let mut files: Vec<String> = swings
        .iter()
        .map(|s| format!("{CLIPS_DIR}/{}.csv", s.clip.clip_id()))
        .collect();
    files.extend([ROIS_FILE, LABELS_FILE, MANIFEST_FILE].map(str::to_owned));
    let manifest = Manifest {
        format: MANIFEST_FORMAT.to_owned(),
        version: MANIFEST_VERSION,
        seed,
        sample_rate_hz: SAMPLE_RATE_HZ,
        files,
        archetypes: spec.to_vec(),
        swings: swings
            .iter()
            .map(|s| ManifestSwing {
                clip_id: s.clip.clip_id().to_owned(),
                archetype: s.archetype.clone(),
                seed: s.seed,
                sagittal: s.sagittal,
                transverse: s.transverse,
                clip_file: format!("{CLIPS_DIR}/{}.csv", s.clip.clip_id()),
                roi: s.roi.clone(),
            })
            .collect(),
        provenance: None,
    };
    Ok(SyntheticDataset { swings, manifest })
}

impl SyntheticDataset {
    pub fn rois(&self) -> Vec<RoiSpec> {
        self.swings.iter().map(|s| s.roi.clone()).collect()
    }

    pub fn labels(&self) -> Vec<LabelRecord> {
        self.swings.iter().flat_map(|s| s.labels.clone()).collect()
    }

    /// Writes clips, ROIs, labels and the manifest under `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), SynthError> {
        let put = |rel: &str, bytes: &[u8]| {
            let path = dir.join(rel);
            write_atomic(&path, bytes).map_err(|source| SynthError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        for s in &self.swings {
            let mut buf = Vec::new();
            write_clip(&s.clip, &mut buf)?;
            put(&format!("{CLIPS_DIR}/{}.csv", s.clip.clip_id()), &buf)?;
        }
        let mut buf = Vec::new();
        write_rois(&self.rois(), &mut buf)?;
        put(ROIS_FILE, &buf)?;
        let mut buf = Vec::new();
        write_labels(&self.labels(), &mut buf)?;
        put(LABELS_FILE, &buf)?;
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        put(MANIFEST_FILE, text.as_bytes())
    }
}
