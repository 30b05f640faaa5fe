use serde::{Deserialize, Serialize};

use super::kmeans::{place_centers, sq_dist, CenterInit};
use super::solve::{
    descend_output_weights, design_matrix, gaussian, solve_output_weights, sum_squared_error,
};
use super::widths::{set_widths, WidthHeuristic};
use super::RbfError;
use crate::features::NormalizationParams;
use crate::mocap::Label;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Scores at or above this are classified `bad`.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputSolver {
    /// Closed-form minimum-norm least squares.
    #[default]
    LeastSquares,
    /// Batch gradient descent capped at `max_epochs`.
    GradientDescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden_units: usize,
    /// Cap on k-means epochs, and on output-weight epochs for gradient descent.
    pub max_epochs: usize,
    pub convergence_tol: f64,
    pub rng_seed: u64,
    pub width_heuristic: WidthHeuristic,
    pub output_solver: OutputSolver,
    pub center_init: CenterInit,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden_units: 4,
            max_epochs: 100,
            convergence_tol: 1e-9,
            rng_seed: 0,
            width_heuristic: WidthHeuristic::NearestCenter,
            output_solver: OutputSolver::LeastSquares,
            center_init: CenterInit::Random,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainDiagnostics {
    pub training_vectors: usize,
    pub clustering_epochs: usize,
    pub clustering_converged: bool,
    /// Output-layer epochs; 0 for the closed-form solve.
    pub output_epochs: usize,
    pub converged: bool,
    pub duplicate_centers: bool,
    pub widths_floored: bool,
    pub single_class: bool,
    pub training_sse: f64,
    pub training_accuracy: f64,
}

impl TrainDiagnostics {
    /// Epochs until the model settled (clustering plus iterative output layer).
    pub fn epochs_to_convergence(&self) -> usize {
        self.clustering_epochs + self.output_epochs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfModel {
    pub format_version: u32,
    pub hidden_units: usize,
    pub centers: Vec<Vec<f64>>,
    pub widths: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub bias: f64,
    pub normalizer: NormalizationParams,
    pub rng_seed: u64,
    pub config: TrainConfig,
    pub diagnostics: TrainDiagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub score: f64,
    pub label: Label,
}

/// Largest hidden-unit count trainable on `n` vectors.
///
/// Training needs strictly more than two vectors per output parameter
/// (`h` weights plus bias): `n > 2(h + 1)`.
pub fn max_hidden_units(n: usize) -> usize {
    (n.saturating_sub(1) / 2).saturating_sub(1)
}

impl RbfModel {
    fn raw_score(&self, x: &[f64]) -> f64 {
        self.bias
            + self
                .centers
                .iter()
                .zip(&self.widths)
                .zip(&self.output_weights)
                .map(|((c, s), w)| w * gaussian(sq_dist(x, c), *s))
                .sum::<f64>()
    }

    /// Scores a raw (unnormalized) feature vector.
    pub fn predict(&self, raw: &[f64]) -> Result<Prediction, RbfError> {
        if self.centers.is_empty() {
            return Err(RbfError::Untrained);
        }
        if raw.len() != self.normalizer.dim() {
            return Err(RbfError::DimensionMismatch {
                expected: self.normalizer.dim(),
                found: raw.len(),
            });
        }
        let score = self.raw_score(&self.normalizer.apply(raw));
        Ok(Prediction {
            score,
            label: if score >= DECISION_THRESHOLD {
                Label::Bad
            } else {
                Label::Good
            },
        })
    }

    pub fn to_json(&self) -> Result<String, RbfError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, RbfError> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let version = v
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .unwrap_or(0) as u32;
        if version != MODEL_FORMAT_VERSION {
            return Err(RbfError::UnsupportedVersion(version));
        }
        Ok(serde_json::from_value(v)?)
    }
}

pub fn predict(model: &RbfModel, raw: &[f64]) -> Result<Prediction, RbfError> {
    model.predict(raw)
}

/// Normalize, place centers, set widths, solve the output layer.
pub fn train<R: AsRef<[f64]>>(
    rows: &[R],
    labels: &[Label],
    config: &TrainConfig,
) -> Result<RbfModel, RbfError> {
    let n = rows.len();
    if n == 0 {
        return Err(RbfError::EmptyInput);
    }
    if labels.len() != n {
        return Err(RbfError::LabelMismatch {
            features: n,
            labels: labels.len(),
        });
    }
    if n < 2 {
        return Err(RbfError::TooFewSamples(n));
    }
    let h = config.hidden_units;
    if h < 2 {
        return Err(RbfError::InvalidHiddenUnits(h));
    }
    if h > max_hidden_units(n) {
        return Err(RbfError::SampleLimit { h, n });
    }

    let normalizer = NormalizationParams::fit(rows).map_err(|e| match e {
        crate::features::FeatureError::DimensionMismatch { expected, found } => {
            RbfError::DimensionMismatch { expected, found }
        }
        _ => RbfError::EmptyInput,
    })?;
    let points: Vec<Vec<f64>> = rows.iter().map(|r| normalizer.apply(r.as_ref())).collect();
    let targets: Vec<f64> = labels.iter().map(|l| l.target()).collect();

    let placement = place_centers(
        &points,
        h,
        config.rng_seed,
        config.max_epochs,
        config.center_init,
    )?;
    let widths = set_widths(&placement.centers, config.width_heuristic, &points);
    let design = design_matrix(&points, &placement.centers, &widths.sigmas);

    let single_class = labels.iter().all(|l| *l == labels[0]);
    let (weights, output_epochs, output_converged) = if single_class {
        log::warn!("training set holds only `{}` swings", labels[0]);
        let mut w = vec![0.0; h + 1];
        w[h] = labels[0].target();
        (w, 0, true)
    } else {
        match config.output_solver {
            OutputSolver::LeastSquares => (solve_output_weights(&design, &targets)?, 0, true),
            OutputSolver::GradientDescent => {
                let r = descend_output_weights(
                    &design,
                    &targets,
                    config.max_epochs,
                    config.convergence_tol,
                )?;
                (r.weights, r.epochs, r.converged)
            }
        }
    };
    let training_sse = sum_squared_error(&design, &weights, &targets);

    let mut model = RbfModel {
        format_version: MODEL_FORMAT_VERSION,
        hidden_units: h,
        centers: placement.centers,
        widths: widths.sigmas,
        output_weights: weights[..h].to_vec(),
        bias: weights[h],
        normalizer,
        rng_seed: config.rng_seed,
        config: config.clone(),
        diagnostics: TrainDiagnostics {
            training_vectors: n,
            clustering_epochs: placement.epochs,
            clustering_converged: placement.converged,
            output_epochs,
            converged: placement.converged && output_converged,
            duplicate_centers: placement.duplicate_centers,
            widths_floored: widths.floored,
            single_class,
            training_sse,
            training_accuracy: 0.0,
        },
        provenance: None,
    };
    let correct = points
        .iter()
        .zip(labels)
        .filter(|(p, l)| {
            let s = model.raw_score(p);
            (s >= DECISION_THRESHOLD) == (**l == Label::Bad)
        })
        .count();
    model.diagnostics.training_accuracy = correct as f64 / n as f64 * 100.0;
    Ok(model)
}
