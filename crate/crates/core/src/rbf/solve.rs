use nalgebra::{DMatrix, DVector};

use super::kmeans::sq_dist;
use super::RbfError;

/// Gaussian activations with a trailing bias column of ones.
pub fn design_matrix(points: &[Vec<f64>], centers: &[Vec<f64>], sigmas: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            centers
                .iter()
                .zip(sigmas)
                .map(|(c, s)| gaussian(sq_dist(p, c), *s))
                .chain(std::iter::once(1.0))
                .collect()
        })
        .collect()
}

pub(crate) fn gaussian(sq_distance: f64, sigma: f64) -> f64 {
    (-sq_distance / (2.0 * sigma * sigma)).exp()
}

fn to_matrix(design: &[Vec<f64>]) -> Result<DMatrix<f64>, RbfError> {
    let rows = design.len();
    let cols = design.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(RbfError::EmptyInput);
    }
    if let Some(bad) = design.iter().find(|r| r.len() != cols) {
        return Err(RbfError::DimensionMismatch {
            expected: cols,
            found: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| design[i][j]))
}

/// Minimum-norm least-squares solution of `design · w = targets`.
///
/// Singular values below `max(rows, cols) · σ_max · ε` are treated as zero,
/// which gives the pseudo-inverse solution for rank-deficient designs.
pub fn solve_output_weights(design: &[Vec<f64>], targets: &[f64]) -> Result<Vec<f64>, RbfError> {
    let a = to_matrix(design)?;
    if targets.len() != a.nrows() {
        return Err(RbfError::LabelMismatch {
            features: a.nrows(),
            labels: targets.len(),
        });
    }
    let b = DVector::from_column_slice(targets);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = a.nrows().max(a.ncols()) as f64 * smax * f64::EPSILON;
    let w = svd.solve(&b, eps).map_err(|e| RbfError::Solver(e.to_owned()))?;
    Ok(w.iter().copied().collect())
}

/// Outcome of iterative output-weight training.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentResult {
    pub weights: Vec<f64>,
    pub epochs: usize,
    pub converged: bool,
}

/// Batch gradient descent on the squared error, starting from zero weights.
///
/// The step is `1 / ‖A‖_F²`, below the inverse Lipschitz constant of the
/// gradient, so the error never increases. Stops when the relative decrease
/// in squared error falls below `tol`.
pub fn descend_output_weights(
    design: &[Vec<f64>],
    targets: &[f64],
    max_epochs: usize,
    tol: f64,
) -> Result<DescentResult, RbfError> {
    let a = to_matrix(design)?;
    if targets.len() != a.nrows() {
        return Err(RbfError::LabelMismatch {
            features: a.nrows(),
            labels: targets.len(),
        });
    }
    let b = DVector::from_column_slice(targets);
    let fro2 = a.norm_squared();
    let mut w = DVector::zeros(a.ncols());
    let mut prev = b.norm_squared();
    let mut epochs = 0;
    let mut converged = false;
    while epochs < max_epochs {
        epochs += 1;
        let r = &a * &w - &b;
        w -= a.tr_mul(&r) / fro2;
        let sse = (&a * &w - &b).norm_squared();
        if prev - sse <= tol * prev.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        prev = sse;
    }
    Ok(DescentResult {
        weights: w.iter().copied().collect(),
        epochs,
        converged,
    })
}

/// Sum of squared residuals of `design · w - targets`.
pub fn sum_squared_error(design: &[Vec<f64>], weights: &[f64], targets: &[f64]) -> f64 {
    design
        .iter()
        .zip(targets)
        .map(|(row, t)| {
            let y: f64 = row.iter().zip(weights).map(|(a, w)| a * w).sum();
            (y - t) * (y - t)
        })
        .sum()
}
