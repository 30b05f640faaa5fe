use serde::{Deserialize, Serialize};

use super::FeatureError;

/// Bounds of the normalized range.
pub const NORMALIZED_LIMIT: f64 = 0.8;

/// Per-feature affine map fitted on a training set: each feature's training
/// minimum goes to -0.8 and its maximum to +0.8. Constant features map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    pub fn fit<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, FeatureError> {
        let first = rows.first().ok_or(FeatureError::EmptyInput)?.as_ref();
        let dim = first.len();
        let mut min = first.to_vec();
        let mut max = first.to_vec();
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(FeatureError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for (k, &v) in row.iter().enumerate() {
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        Ok(NormalizationParams { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Applies the stored map. Values outside the training range are not clipped.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim());
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| {
                if hi > lo {
                    NORMALIZED_LIMIT * (2.0 * (v - lo) / (hi - lo) - 1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }
}
