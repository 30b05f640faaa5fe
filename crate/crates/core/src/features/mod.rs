//! Plane projections, quadratic compression and normalization.
//!
//! A swing becomes twelve numbers: the `(p2, p1, p0)` coefficients of four
//! quadratic fits, each taken with the forward coordinate X as the independent
//! variable.
//!
//! | index | plane      | curve      |
//! |-------|------------|------------|
//! | 0..3  | sagittal   | tip curve  |
//! | 3..6  | sagittal   | trajectory |
//! | 6..9  | transverse | tip curve  |
//! | 9..12 | transverse | trajectory |

mod normalize;
mod polyfit;

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{TipPath, VirtualMarkerPath};
use crate::mocap::Point3;

pub use normalize::{NormalizationParams, NORMALIZED_LIMIT};
pub use polyfit::{poly_fit2, FitError, PolyFit3};

pub const FEATURE_DIM: usize = 12;

/// Fewest frames a quadratic fit can be taken over.
pub const MIN_FIT_FRAMES: usize = 3;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("degenerate fit: {}", describe(.0))]
    DegenerateFits(Vec<(Plane, Curve, FitError)>),
    #[error("trajectory and tips differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("ROI of {0} frames is too short for a quadratic fit")]
    TooShort(usize),
    #[error("no feature vectors")]
    EmptyInput,
    #[error("expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("feature csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("feature csv row {row}: {message}")]
    Format { row: usize, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn describe(fails: &[(Plane, Curve, FitError)]) -> String {
    fails
        .iter()
        .map(|(p, c, e)| format!("{p} {c}: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    /// Side view: (X, Z).
    Sagittal,
    /// Top view: (X, Y).
    Transverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curve {
    TipCurve,
    Trajectory,
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Plane::Sagittal => "sagittal",
            Plane::Transverse => "transverse",
        })
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Curve::TipCurve => "tip curve",
            Curve::Trajectory => "trajectory",
        })
    }
}

/// Fit order of the feature vector.
pub const FIT_ORDER: [(Plane, Curve); 4] = [
    (Plane::Sagittal, Curve::TipCurve),
    (Plane::Sagittal, Curve::Trajectory),
    (Plane::Transverse, Curve::TipCurve),
    (Plane::Transverse, Curve::Trajectory),
];

pub fn project_plane(points: &[Point3], plane: Plane) -> Vec<(f64, f64)> {
    points
        .iter()
        .map(|p| match plane {
            Plane::Sagittal => (p[0], p[2]),
            Plane::Transverse => (p[0], p[1]),
        })
        .collect()
}

/// The 12-value spatial pattern of one swing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub swing_id: String,
    pub values: [f64; FEATURE_DIM],
}

impl FeatureVector {
    /// Coefficients `(p2, p1, p0)` of one of the four fits.
    pub fn fit(&self, plane: Plane, curve: Curve) -> [f64; 3] {
        let slot = FIT_ORDER
            .iter()
            .position(|pc| *pc == (plane, curve))
            .expect("every plane/curve pair has a slot");
        [self.values[3 * slot], self.values[3 * slot + 1], self.values[3 * slot + 2]]
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Compresses a sweet-spot trajectory and its tip path into twelve values.
///
/// Every failing fit is reported, not only the first.
pub fn assemble_features(
    swing_id: &str,
    traj: &VirtualMarkerPath,
    tips: &TipPath,
) -> Result<FeatureVector, FeatureError> {
    if traj.positions.len() != tips.tips.len() {
        return Err(FeatureError::LengthMismatch(traj.positions.len(), tips.tips.len()));
    }
    let len = traj.positions.len();
    if len < MIN_FIT_FRAMES {
        return Err(FeatureError::TooShort(len));
    }
    if !crate::mocap::TYPICAL_ROI_FRAMES.contains(&len) {
        log::warn!("swing {swing_id}: {len}-frame ROI is outside the usual 7..=13");
    }

    let mut values = [0.0; FEATURE_DIM];
    let mut failures = Vec::new();
    for (slot, (plane, curve)) in FIT_ORDER.into_iter().enumerate() {
        let points = match curve {
            Curve::TipCurve => &tips.tips,
            Curve::Trajectory => &traj.positions,
        };
        match poly_fit2(&project_plane(points, plane)) {
            Ok(fit) => values[3 * slot..3 * slot + 3].copy_from_slice(&fit.coefficients()),
            Err(e) => failures.push((plane, curve, e)),
        }
    }
    if !failures.is_empty() {
        return Err(FeatureError::DegenerateFits(failures));
    }
    Ok(FeatureVector {
        swing_id: swing_id.to_owned(),
        values,
    })
}

/// One row of the input-space reduction summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionRow {
    pub roi_duration: usize,
    pub marker_count: usize,
    pub input_dim: usize,
    pub output_dim: usize,
    /// Percentage, unrounded.
    pub reduction_percent: f64,
}

impl ReductionRow {
    /// Reduction rendered to one decimal, e.g. `98.2%`.
    pub fn reduction_label(&self) -> String {
        format!("{:.1}%", self.reduction_percent)
    }
}

pub fn reduction_report(roi_duration: usize, marker_count: usize) -> ReductionRow {
    let input_dim = roi_duration * 3 * marker_count;
    ReductionRow {
        roi_duration,
        marker_count,
        input_dim,
        output_dim: FEATURE_DIM,
        reduction_percent: (1.0 - FEATURE_DIM as f64 / input_dim as f64) * 100.0,
    }
}

pub fn fit_normalizer(features: &[FeatureVector]) -> Result<NormalizationParams, FeatureError> {
    NormalizationParams::fit(features)
}

pub fn apply_normalizer(params: &NormalizationParams, v: &FeatureVector) -> FeatureVector {
    let mapped = params.apply(&v.values);
    let mut values = [0.0; FEATURE_DIM];
    values.copy_from_slice(&mapped);
    FeatureVector {
        swing_id: v.swing_id.clone(),
        values,
    }
}

/// Writes `swing_id,f0..f11` rows.
pub fn write_features<W: Write>(features: &[FeatureVector], out: W) -> Result<(), FeatureError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["swing_id".to_owned()];
    header.extend((0..FEATURE_DIM).map(|k| format!("f{k}")));
    w.write_record(&header)?;
    for f in features {
        let mut row = vec![f.swing_id.clone()];
        row.extend(f.values.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_features<R: Read>(input: R) -> Result<Vec<FeatureVector>, FeatureError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader.headers()?.clone();
    let expected: Vec<String> = std::iter::once("swing_id".to_owned())
        .chain((0..FEATURE_DIM).map(|k| format!("f{k}")))
        .collect();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(FeatureError::Format {
            row: 0,
            message: format!("header must be {}", expected.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let mut values = [0.0; FEATURE_DIM];
        for (k, v) in values.iter_mut().enumerate() {
            *v = rec[k + 1].parse().map_err(|_| FeatureError::Format {
                row,
                message: format!("f{k}: `{}` is not a number", &rec[k + 1]),
            })?;
        }
        out.push(FeatureVector {
            swing_id: rec[0].to_owned(),
            values,
        });
    }
    Ok(out)
}

pub fn load_features(path: &Path) -> Result<Vec<FeatureVector>, FeatureError> {
    parse_features(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{compute_vector_tips, gradient_flow};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn projections() {
        let p = [[1.0, 2.0, 3.0]];
        assert_eq!(project_plane(&p, Plane::Sagittal), [(1.0, 3.0)]);
        assert_eq!(project_plane(&p, Plane::Transverse), [(1.0, 2.0)]);
        let flat: Vec<Point3> = (0..5).map(|i| [i as f64, 0.0, 1.0]).collect();
        assert!(project_plane(&flat, Plane::Transverse).iter().all(|(_, b)| *b == 0.0));
    }

    #[test]
    fn reduction_rows() {
        let rows: Vec<_> = [13, 10, 7].map(|d| reduction_report(d, 22)).to_vec();
        let dims: Vec<_> = rows.iter().map(|r| r.input_dim).collect();
        assert_eq!(dims, [858, 660, 462]);
        assert!(rows.iter().all(|r| r.output_dim == 12));
        let labels: Vec<_> = rows.iter().map(ReductionRow::reduction_label).collect();
        assert_eq!(labels, ["98.6%", "98.2%", "97.4%"]);
    }

    fn quadratic_swing(len: usize, sag: [f64; 3], trans: [f64; 3]) -> VirtualMarkerPath {
        let q = |c: [f64; 3], x: f64| c[0] * x * x + c[1] * x + c[2];
        VirtualMarkerPath {
            positions: (0..len)
                .map(|t| {
                    let x = -0.5 + 0.1 * t as f64;
                    [x, q(trans, x), q(sag, x)]
                })
                .collect(),
        }
    }

    #[test]
    fn assembles_twelve_values_in_order() {
        let (sag, trans) = ([0.4, 0.2, 1.0], [-0.3, 0.1, 0.5]);
        let path = quadratic_swing(13, sag, trans);
        let tips = compute_vector_tips(&path, &gradient_flow(&path).unwrap()).unwrap();
        let f = assemble_features("s", &path, &tips).unwrap();
        for (got, want) in f.fit(Plane::Sagittal, Curve::Trajectory).iter().zip(sag) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        for (got, want) in f.fit(Plane::Transverse, Curve::Trajectory).iter().zip(trans) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        assert_eq!(&f.values[3..6], &f.fit(Plane::Sagittal, Curve::Trajectory));
    }

    #[test]
    fn vertical_swing_fails_in_both_planes() {
        let path = VirtualMarkerPath {
            positions: (0..9).map(|t| [0.3, 0.1 * t as f64, 1.0 + 0.05 * t as f64]).collect(),
        };
        let tips = compute_vector_tips(&path, &gradient_flow(&path).unwrap()).unwrap();
        match assemble_features("v", &path, &tips).unwrap_err() {
            FeatureError::DegenerateFits(fails) => {
                assert!(fails.iter().any(|f| f.0 == Plane::Sagittal));
                assert!(fails.iter().any(|f| f.0 == Plane::Transverse));
                assert_eq!(fails.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_short_and_mismatch() {
        let path = quadratic_swing(2, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let tips = TipPath {
            tips: path.positions.clone(),
        };
        assert!(matches!(assemble_features("s", &path, &tips), Err(FeatureError::TooShort(2))));
        let short = TipPath { tips: vec![] };
        assert!(matches!(
            assemble_features("s", &path, &short),
            Err(FeatureError::LengthMismatch(2, 0))
        ));
    }

    #[test]
    fn normalizer_on_feature_vectors() {
        let mk = |id: &str, v: f64| FeatureVector {
            swing_id: id.into(),
            values: [v; FEATURE_DIM],
        };
        let train = vec![mk("a", 1.0), mk("b", 2.0), mk("c", 3.0)];
        let p = fit_normalizer(&train).unwrap();
        assert_eq!(apply_normalizer(&p, &train[0]).values, [-0.8; FEATURE_DIM]);
        assert_eq!(apply_normalizer(&p, &train[1]).values, [0.0; FEATURE_DIM]);
        assert!(apply_normalizer(&p, &mk("d", 4.0)).values.iter().all(|v| *v > 0.8));
        assert!(matches!(fit_normalizer(&[]), Err(FeatureError::EmptyInput)));
    }

    #[test]
    fn feature_csv_roundtrip() {
        let f = vec![FeatureVector {
            swing_id: "s01".into(),
            values: [0.1, -2.5, 1e-17, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 0.3],
        }];
        let mut buf = Vec::new();
        write_features(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("swing_id,f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11\n"));
        assert_eq!(parse_features(buf.as_slice()).unwrap(), f);
    }

    proptest! {
        #[test]
        fn always_twelve_values(
            len in 3usize..=13,
            sag in [-1.0f64..1.0, -1.0f64..1.0, 0.5f64..1.5],
            trans in [-1.0f64..1.0, -1.0f64..1.0, -0.5f64..0.5],
        ) {
            let path = quadratic_swing(len, sag, trans);
            let tips = compute_vector_tips(&path, &gradient_flow(&path).unwrap()).unwrap();
            let f = assemble_features("s", &path, &tips).unwrap();
            prop_assert_eq!(f.values.len(), FEATURE_DIM);
        }

        #[test]
        fn normalized_training_set_spans_limits(
            rows in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 4), 2..20),
        ) {
            let p = NormalizationParams::fit(&rows).unwrap();
            let mapped: Vec<Vec<f64>> = rows.iter().map(|r| p.apply(r)).collect();
            for k in 0..4 {
                if p.max[k] > p.min[k] {
                    let lo = mapped.iter().map(|r| r[k]).fold(f64::INFINITY, f64::min);
                    let hi = mapped.iter().map(|r| r[k]).fold(f64::NEG_INFINITY, f64::max);
                    prop_assert_eq!(lo, -0.8);
                    prop_assert_eq!(hi, 0.8);
                }
            }
        }
    }
}
