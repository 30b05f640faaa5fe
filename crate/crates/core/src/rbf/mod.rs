//! Gaussian radial-basis-function classifier.
//!
//! Training is two-phase: k-means places the hidden units in normalized
//! feature space, then the linear output layer (weights plus bias) is solved
//! against targets `bad = 1`, `good = 0`. A score of 0.5 or more means `bad`.

mod kmeans;
mod model;
mod solve;
mod widths;

use thiserror::Error;

pub use kmeans::{place_centers, CenterInit, CenterPlacement};
pub use model::{
    max_hidden_units, predict, train, OutputSolver, Prediction, RbfModel, TrainConfig,
    TrainDiagnostics, DECISION_THRESHOLD, MODEL_FORMAT_VERSION,
};
pub use solve::{
    descend_output_weights, design_matrix, solve_output_weights, sum_squared_error,
    DescentResult,
};
pub use widths::{set_widths, WidthHeuristic, Widths, MIN_WIDTH};

#[derive(Debug, Error)]
pub enum RbfError {
    #[error("cannot form {h} clusters from {n} points")]
    ClusterCount { h: usize, n: usize },
    #[error("hidden units must be at least 2, got {0}")]
    InvalidHiddenUnits(usize),
    #[error(
        "{h} hidden units need more than {} training vectors, got {n} \
         (small-sample limit: at most {} units)",
        2 * (.h + 1),
        max_hidden_units(*.n)
    )]
    SampleLimit { h: usize, n: usize },
    #[error("need at least 2 training vectors, got {0}")]
    TooFewSamples(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("{features} feature rows but {labels} labels")]
    LabelMismatch { features: usize, labels: usize },
    #[error("expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("model has no hidden units")]
    Untrained,
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("least-squares solve failed: {0}")]
    Solver(String),
    #[error("model json: {0}")]
    Json(#[from] serde_json::Error),
}
