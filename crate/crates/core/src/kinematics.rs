//! Virtual sweet-spot marker, its gradient vector flow, and the vector tips.
//!
//! Gradients are taken per component with unit frame spacing, so flow vectors
//! are in metres per frame. Multiply by the sample rate (see
//! [`GradientFlow::velocities`]) for metres per second.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mocap::{MocapError, Point3, SwingClip};

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("paths differ in length: {0:?}")]
    LengthMismatch(Vec<usize>),
    #[error("racquet markers collinear or coincident at frame {frame}")]
    DegenerateGeometry { frame: usize },
    #[error("non-finite sample at frame {frame}")]
    MissingSample { frame: usize },
    #[error("need at least {min} frames, got {len}")]
    TooShort { len: usize, min: usize },
    #[error(transparent)]
    Mocap(#[from] MocapError),
}

/// How the sweet spot is placed relative to the racquet triad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweetSpotMethod {
    /// In-plane point equidistant from all three markers.
    #[default]
    Circumcenter,
    /// Mean of the three markers; kept for sensitivity comparisons.
    Centroid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualMarkerPath {
    pub positions: Vec<Point3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientFlow {
    pub vectors: Vec<Point3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TipPath {
    pub tips: Vec<Point3>,
}

impl VirtualMarkerPath {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

impl GradientFlow {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Flow in metres per second.
    pub fn velocities(&self, sample_rate_hz: f64) -> Vec<Point3> {
        self.vectors.iter().map(|v| scale(*v, sample_rate_hz)).collect()
    }

    /// Second derivative of the path in m/s², from the same difference scheme.
    pub fn accelerations(&self, sample_rate_hz: f64) -> Vec<Point3> {
        let rate2 = sample_rate_hz * sample_rate_hz;
        if self.vectors.len() < 2 {
            return vec![[0.0; 3]; self.vectors.len()];
        }
        central_gradient(&self.vectors)
            .into_iter()
            .map(|a| scale(a, rate2))
            .collect()
    }
}

pub(crate) fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn add(a: Point3, b: Point3) -> Point3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn scale(a: Point3, s: f64) -> Point3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

/// Relative `sin²` of the triad angle below which the triangle is degenerate.
const COLLINEAR_SIN2: f64 = 1e-12;

fn circumcenter(p: Point3, q: Point3, r: Point3) -> Option<Point3> {
    let a = sub(p, r);
    let b = sub(q, r);
    let a2 = dot(a, a);
    let b2 = dot(b, b);
    let axb = cross(a, b);
    let axb2 = dot(axb, axb);
    if a2 == 0.0 || b2 == 0.0 || axb2 <= COLLINEAR_SIN2 * a2 * b2 {
        return None;
    }
    let num = cross(sub(scale(b, a2), scale(a, b2)), axb);
    Some(add(r, scale(num, 1.0 / (2.0 * axb2))))
}

/// Per-frame sweet spot of the racquet triad (R1, R2, H).
pub fn compute_sweet_spot(
    r1: &[Point3],
    r2: &[Point3],
    h: &[Point3],
) -> Result<VirtualMarkerPath, KinematicsError> {
    compute_sweet_spot_with(r1, r2, h, SweetSpotMethod::Circumcenter)
}

pub fn compute_sweet_spot_with(
    r1: &[Point3],
    r2: &[Point3],
    h: &[Point3],
    method: SweetSpotMethod,
) -> Result<VirtualMarkerPath, KinematicsError> {
    if r1.len() != r2.len() || r1.len() != h.len() {
        return Err(KinematicsError::LengthMismatch(vec![r1.len(), r2.len(), h.len()]));
    }
    let mut positions = Vec::with_capacity(r1.len());
    for (frame, ((&p, &q), &r)) in r1.iter().zip(r2).zip(h).enumerate() {
        if [p, q, r].iter().flatten().any(|v| !v.is_finite()) {
            return Err(KinematicsError::MissingSample { frame });
        }
        // The centroid needs no circumcircle, but a flat triad still means the
        // racquet plane is unknown, so both methods reject it.
        let cc = circumcenter(p, q, r).ok_or(KinematicsError::DegenerateGeometry { frame })?;
        positions.push(match method {
            SweetSpotMethod::Circumcenter => cc,
            SweetSpotMethod::Centroid => scale(add(add(p, q), r), 1.0 / 3.0),
        });
    }
    Ok(VirtualMarkerPath { positions })
}

/// Sweet-spot path of an (already ROI-sliced) clip.
pub fn sweet_spot_from_clip(
    clip: &SwingClip,
    method: SweetSpotMethod,
) -> Result<VirtualMarkerPath, KinematicsError> {
    let r1 = clip.marker_path("R1")?;
    let r2 = clip.marker_path("R2")?;
    let h = clip.marker_path("H")?;
    compute_sweet_spot_with(&r1, &r2, &h, method)
}

/// Central differences inside, one-sided differences at both ends. Needs len ≥ 2.
fn central_gradient(series: &[Point3]) -> Vec<Point3> {
    let n = series.len();
    (0..n)
        .map(|t| match t {
            0 => sub(series[1], series[0]),
            t if t == n - 1 => sub(series[n - 1], series[n - 2]),
            t => scale(sub(series[t + 1], series[t - 1]), 0.5),
        })
        .collect()
}

/// Motion gradient vector flow of the sweet spot.
pub fn gradient_flow(path: &VirtualMarkerPath) -> Result<GradientFlow, KinematicsError> {
    if path.len() < 2 {
        return Err(KinematicsError::TooShort {
            len: path.len(),
            min: 2,
        });
    }
    Ok(GradientFlow {
        vectors: central_gradient(&path.positions),
    })
}

/// Advances each position by its flow vector over one frame.
pub fn compute_vector_tips(
    path: &VirtualMarkerPath,
    flow: &GradientFlow,
) -> Result<TipPath, KinematicsError> {
    if path.len() != flow.len() {
        return Err(KinematicsError::LengthMismatch(vec![path.len(), flow.len()]));
    }
    Ok(TipPath {
        tips: path
            .positions
            .iter()
            .zip(&flow.vectors)
            .map(|(p, g)| add(*p, *g))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn line_x(xs: &[f64]) -> VirtualMarkerPath {
        VirtualMarkerPath {
            positions: xs.iter().map(|&x| [x, 0.0, 0.0]).collect(),
        }
    }

    fn xs(flow: &GradientFlow) -> Vec<f64> {
        flow.vectors.iter().map(|v| v[0]).collect()
    }

    #[test]
    fn equilateral_circumcenter() {
        let s3 = 3f64.sqrt();
        let ss = compute_sweet_spot(&[[0.0, 0.0, 0.0]], &[[1.0, 0.0, 0.0]], &[[0.5, s3 / 2.0, 0.0]])
            .unwrap();
        let c = ss.positions[0];
        assert_abs_diff_eq!(c[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c[1], s3 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(norm(c), 1.0 / s3, epsilon = 1e-12);
    }

    #[test]
    fn right_triangle_hits_hypotenuse_midpoint() {
        let ss = compute_sweet_spot(&[[0.0, 0.0, 0.0]], &[[2.0, 0.0, 0.0]], &[[0.0, 2.0, 0.0]])
            .unwrap();
        let c = ss.positions[0];
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn collinear_triad_is_degenerate() {
        let ok = [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]];
        let r1 = [ok[0], [0.0, 0.0, 0.0]];
        let r2 = [ok[1], [1.0, 0.0, 0.0]];
        let h = [ok[2], [2.0, 0.0, 0.0]];
        assert!(matches!(
            compute_sweet_spot(&r1, &r2, &h),
            Err(KinematicsError::DegenerateGeometry { frame: 1 })
        ));
        let coincident = compute_sweet_spot(&[[1.0; 3]], &[[1.0; 3]], &[[0.0; 3]]);
        assert!(matches!(coincident, Err(KinematicsError::DegenerateGeometry { frame: 0 })));
    }

    #[test]
    fn centroid_method() {
        let ss = compute_sweet_spot_with(
            &[[0.0, 0.0, 0.0]],
            &[[3.0, 0.0, 0.0]],
            &[[0.0, 3.0, 0.0]],
            SweetSpotMethod::Centroid,
        )
        .unwrap();
        assert_eq!(ss.positions[0], [1.0, 1.0, 0.0]);
    }

    #[test]
    fn nan_and_length_errors() {
        assert!(matches!(
            compute_sweet_spot(&[[f64::NAN, 0.0, 0.0]], &[[1.0, 0.0, 0.0]], &[[0.0, 1.0, 0.0]]),
            Err(KinematicsError::MissingSample { frame: 0 })
        ));
        assert!(matches!(
            compute_sweet_spot(&[[0.0; 3]], &[], &[[0.0; 3]]),
            Err(KinematicsError::LengthMismatch(_))
        ));
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(xs(&gradient_flow(&line_x(&[0.0, 1.0, 2.0, 3.0])).unwrap()), [1.0; 4]);
        assert_eq!(
            xs(&gradient_flow(&line_x(&[0.0, 1.0, 4.0, 9.0])).unwrap()),
            [1.0, 2.0, 4.0, 5.0]
        );
        let flat = gradient_flow(&line_x(&[2.5; 6])).unwrap();
        assert!(flat.vectors.iter().flatten().all(|v| *v == 0.0));
        assert!(matches!(
            gradient_flow(&line_x(&[1.0])),
            Err(KinematicsError::TooShort { len: 1, min: 2 })
        ));
    }

    #[test]
    fn two_frame_gradient_is_the_step() {
        assert_eq!(xs(&gradient_flow(&line_x(&[1.0, 4.0])).unwrap()), [3.0, 3.0]);
    }

    #[test]
    fn tip_examples() {
        let path = VirtualMarkerPath {
            positions: vec![[1.0, 1.0, 1.0]],
        };
        let flow = GradientFlow {
            vectors: vec![[0.5, 0.0, -0.5]],
        };
        assert_eq!(compute_vector_tips(&path, &flow).unwrap().tips, vec![[1.5, 1.0, 0.5]]);
        let zero = GradientFlow {
            vectors: vec![[0.0; 3]],
        };
        assert_eq!(compute_vector_tips(&path, &zero).unwrap().tips, path.positions);
        assert!(compute_vector_tips(&path, &GradientFlow { vectors: vec![] }).is_err());
    }

    #[test]
    fn linear_motion_tips_land_on_next_position() {
        let step = [0.25, -0.125, 0.5];
        let path = VirtualMarkerPath {
            positions: (0..9).map(|t| scale(step, t as f64)).collect(),
        };
        let tips = compute_vector_tips(&path, &gradient_flow(&path).unwrap()).unwrap();
        for t in 1..8 {
            assert_eq!(tips.tips[t], path.positions[t + 1]);
        }
    }

    #[test]
    fn velocity_and_acceleration_accessors() {
        // x = t² at 50 Hz sampling: interior acceleration is 2 m/frame² * 2500
        let path = line_x(&[0.0, 1.0, 4.0, 9.0, 16.0, 25.0]);
        let flow = gradient_flow(&path).unwrap();
        assert_eq!(flow.velocities(50.0)[2][0], 4.0 * 50.0);
        assert_eq!(flow.accelerations(50.0)[2][0], 2.0 * 2500.0);
    }

    fn point() -> impl Strategy<Value = Point3> {
        [-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0]
    }

    fn triad() -> impl Strategy<Value = (Point3, Point3, Point3)> {
        (point(), point(), point()).prop_filter("non-degenerate", |(p, q, r)| {
            let a = sub(*p, *r);
            let b = sub(*q, *r);
            norm(cross(a, b)) > 0.05 * norm(a) * norm(b) && norm(a) > 0.05 && norm(b) > 0.05
        })
    }

    proptest! {
        #[test]
        fn sweet_spot_is_equidistant_and_coplanar((p, q, r) in triad()) {
            let c = compute_sweet_spot(&[p], &[q], &[r]).unwrap().positions[0];
            let (dp, dq, dr) = (norm(sub(c, p)), norm(sub(c, q)), norm(sub(c, r)));
            let tol = 1e-9 * dp.max(1.0);
            prop_assert!((dp - dq).abs() < tol && (dp - dr).abs() < tol);
            let n = cross(sub(p, r), sub(q, r));
            prop_assert!(dot(n, sub(c, r)).abs() < 1e-9 * norm(n).max(1.0) * dp.max(1.0));
        }

        #[test]
        fn translation_equivariance(
            tris in prop::collection::vec(triad(), 2..10),
            shift in point(),
        ) {
            let (r1, r2, h): (Vec<_>, Vec<_>, Vec<_>) = tris.iter().fold(
                (vec![], vec![], vec![]),
                |(mut a, mut b, mut c), (p, q, r)| { a.push(*p); b.push(*q); c.push(*r); (a, b, c) },
            );
            let moved = |v: &[Point3]| v.iter().map(|p| add(*p, shift)).collect::<Vec<_>>();
            let base = compute_sweet_spot(&r1, &r2, &h).unwrap();
            let shifted = compute_sweet_spot(&moved(&r1), &moved(&r2), &moved(&h)).unwrap();
            for (a, b) in base.positions.iter().zip(&shifted.positions) {
                for k in 0..3 {
                    prop_assert!((a[k] + shift[k] - b[k]).abs() < 1e-9);
                }
            }
            let fa = gradient_flow(&base).unwrap();
            let fb = gradient_flow(&shifted).unwrap();
            for (a, b) in fa.vectors.iter().zip(&fb.vectors) {
                for k in 0..3 {
                    prop_assert!((a[k] - b[k]).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn scale_equivariance(
            path in prop::collection::vec(point(), 2..14),
            s in 0.1f64..10.0,
        ) {
            let p = VirtualMarkerPath { positions: path.clone() };
            let ps = VirtualMarkerPath { positions: path.iter().map(|v| scale(*v, s)).collect() };
            let f = gradient_flow(&p).unwrap();
            let fs = gradient_flow(&ps).unwrap();
            let t = compute_vector_tips(&p, &f).unwrap();
            let ts = compute_vector_tips(&ps, &fs).unwrap();
            for i in 0..path.len() {
                for k in 0..3 {
                    prop_assert!((f.vectors[i][k] * s - fs.vectors[i][k]).abs() < 1e-12 * s.max(1.0) * 8.0);
                    prop_assert!((t.tips[i][k] * s - ts.tips[i][k]).abs() < 1e-12 * s.max(1.0) * 8.0);
                }
            }
        }

        #[test]
        fn quadratic_paths_have_exact_interior_derivatives(
            c in [-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0],
            n in 3usize..14,
        ) {
            let f = |t: f64| c[0] * t * t + c[1] * t + c[2];
            let path = line_x(&(0..n).map(|t| f(t as f64)).collect::<Vec<_>>());
            let flow = gradient_flow(&path).unwrap();
            for t in 1..n - 1 {
                let exact = 2.0 * c[0] * t as f64 + c[1];
                prop_assert!((flow.vectors[t][0] - exact).abs() < 1e-9);
            }
        }

        #[test]
        fn tips_minus_positions_reproduce_flow(path in prop::collection::vec(point(), 2..14)) {
            let p = VirtualMarkerPath { positions: path };
            let f = gradient_flow(&p).unwrap();
            let t = compute_vector_tips(&p, &f).unwrap();
            for i in 0..p.len() {
                for k in 0..3 {
                    prop_assert_eq!(t.tips[i][k], p.positions[i][k] + f.vectors[i][k]);
                }
            }
        }
    }
}
