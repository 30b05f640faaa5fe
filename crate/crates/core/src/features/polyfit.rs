use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("quadratic fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("quadratic fit is rank deficient: {distinct} distinct abscissae")]
    Degenerate { distinct: usize },
    #[error("non-finite input at point {0}")]
    NonFinite(usize),
}

/// Coefficients of `b(a) = p2·a² + p1·a + p0` plus fit residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyFit3 {
    pub p2: f64,
    pub p1: f64,
    pub p0: f64,
    /// Sum of squared residuals.
    pub sse: f64,
    pub max_abs_residual: f64,
}

impl PolyFit3 {
    pub fn eval(&self, a: f64) -> f64 {
        (self.p2 * a + self.p1) * a + self.p0
    }

    pub fn coefficients(&self) -> [f64; 3] {
        [self.p2, self.p1, self.p0]
    }
}

/// Relative magnitude of an R diagonal entry treated as zero.
const RANK_TOL: f64 = 1e-10;

/// Least-squares quadratic through `(a, b)` pairs.
///
/// Abscissae are centred and scaled onto [-1, 1] before a QR solve; the
/// coefficients are mapped back to the original variable.
pub fn poly_fit2(pairs: &[(f64, f64)]) -> Result<PolyFit3, FitError> {
    if pairs.len() < 3 {
        return Err(FitError::TooFewPoints(pairs.len()));
    }
    if let Some(i) = pairs.iter().position(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(FitError::NonFinite(i));
    }
    let mut xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(FitError::Degenerate {
            distinct: xs.len(),
        });
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let n = pairs.len();
    let design = DMatrix::from_fn(n, 3, |i, j| {
        let u = (pairs[i].0 - center) / half;
        match j {
            0 => u * u,
            1 => u,
            _ => 1.0,
        }
    });
    let rhs = DVector::from_iterator(n, pairs.iter().map(|p| p.1));

    let qr = design.qr();
    let r = qr.r();
    let rmax = (0..3).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..3).any(|i| r[(i, i)].abs() <= RANK_TOL * rmax) {
        return Err(FitError::Degenerate {
            distinct: xs.len(),
        });
    }
    let qtb = qr.q().transpose() * &rhs;
    let q = r
        .solve_upper_triangular(&qtb)
        .ok_or(FitError::Degenerate { distinct: xs.len() })?;
    let (q2, q1, q0) = (q[0], q[1], q[2]);

    // b = q2·((a-c)/s)² + q1·(a-c)/s + q0
    let s2 = half * half;
    let p2 = q2 / s2;
    let p1 = q1 / half - 2.0 * q2 * center / s2;
    let p0 = q2 * center * center / s2 - q1 * center / half + q0;

    // Residuals in the scaled basis, which is the better-conditioned one.
    let mut sse = 0.0;
    let mut max_abs = 0.0f64;
    for &(a, b) in pairs {
        let u = (a - center) / half;
        let e = b - ((q2 * u + q1) * u + q0);
        sse += e * e;
        max_abs = max_abs.max(e.abs());
    }
    Ok(PolyFit3 {
        p2,
        p1,
        p0,
        sse,
        max_abs_residual: max_abs,
    })
}
