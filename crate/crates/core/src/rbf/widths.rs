use serde::{Deserialize, Serialize};

use super::kmeans::sq_dist;

/// Smallest width a unit may have.
pub const MIN_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WidthHeuristic {
    /// σ_j = distance from center j to its nearest other center.
    #[default]
    NearestCenter,
    /// σ = d_max / √(2h) for every unit, d_max the largest center spacing.
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Widths {
    pub sigmas: Vec<f64>,
    /// At least one width was raised to [`MIN_WIDTH`].
    pub floored: bool,
}

/// Gaussian widths for a set of centers.
///
/// With a single center neither heuristic is defined, so the width becomes
/// the mean distance from the training points to that center.
pub fn set_widths(
    centers: &[Vec<f64>],
    heuristic: WidthHeuristic,
    training: &[Vec<f64>],
) -> Widths {
    let h = centers.len();
    let raw: Vec<f64> = if h == 1 {
        let mean = if training.is_empty() {
            0.0
        } else {
            training
                .iter()
                .map(|p| sq_dist(p, &centers[0]).sqrt())
                .sum::<f64>()
                / training.len() as f64
        };
        vec![mean]
    } else {
        match heuristic {
            WidthHeuristic::NearestCenter => (0..h)
                .map(|j| {
                    (0..h)
                        .filter(|&k| k != j)
                        .map(|k| sq_dist(&centers[j], &centers[k]))
                        .fold(f64::INFINITY, f64::min)
                        .sqrt()
                })
                .collect(),
            WidthHeuristic::Global => {
                let mut dmax = 0.0f64;
                for j in 0..h {
                    for k in j + 1..h {
                        dmax = dmax.max(sq_dist(&centers[j], &centers[k]));
                    }
                }
                vec![dmax.sqrt() / (2.0 * h as f64).sqrt(); h]
            }
        }
    };
    let floored = raw.iter().any(|s| *s < MIN_WIDTH);
    if floored {
        log::warn!("RBF width floored at {MIN_WIDTH}: coincident centers");
    }
    Widths {
        sigmas: raw.into_iter().map(|s| s.max(MIN_WIDTH)).collect(),
        floored,
    }
}
