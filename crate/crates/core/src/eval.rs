//! Leave-one-out evaluation, repeated over seeds and swept over hidden units.
//!
//! Samples are kept sorted by swing id and every fold derives its seed from
//! `(master seed, held-out id)`, so fold outcomes do not depend on input
//! order. Refused or non-converged folds count as misclassifications and are
//! flagged on the fold.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVector;
use crate::mocap::Label;
use crate::rbf::{self, TrainConfig};
use crate::seed::{derive_seed, stream_seed};

/// Default number of repeated LOO runs.
pub const DEFAULT_REPEATS: usize = 12;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("accuracy of an empty error list")]
    Empty,
    #[error("leave-one-out needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("duplicate swing id `{0}`")]
    DuplicateId(String),
    #[error("no label for swing `{0}`")]
    MissingLabel(String),
    #[error("sample `{id}` has {found} values, expected {expected}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("repeats must be at least 1")]
    NoRepeats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub values: Vec<f64>,
    pub label: Label,
}

impl AsRef<[f64]> for Sample {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Labelled samples under one criterion, sorted by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(mut samples: Vec<Sample>) -> Result<Self, EvalError> {
        samples.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = samples.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(EvalError::DuplicateId(w[0].id.clone()));
        }
        if let Some(first) = samples.first() {
            let dim = first.values.len();
            if let Some(bad) = samples.iter().find(|s| s.values.len() != dim) {
                return Err(EvalError::DimensionMismatch {
                    id: bad.id.clone(),
                    expected: dim,
                    found: bad.values.len(),
                });
            }
        }
        Ok(Dataset { samples })
    }

    /// Joins feature vectors with one criterion's labels; every swing needs a label.
    pub fn from_features(
        features: &[FeatureVector],
        labels: &BTreeMap<String, Label>,
    ) -> Result<Self, EvalError> {
        let samples = features
            .iter()
            .map(|f| {
                let label = *labels
                    .get(&f.swing_id)
                    .ok_or_else(|| EvalError::MissingLabel(f.swing_id.clone()))?;
                Ok(Sample {
                    id: f.swing_id.clone(),
                    values: f.values.to_vec(),
                    label,
                })
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        Dataset::new(samples)
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Percentage of `bad` samples.
    pub fn bad_fraction(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let bad = self.samples.iter().filter(|s| s.label == Label::Bad).count();
        bad as f64 / self.samples.len() as f64 * 100.0
    }
}

/// `(1 - Σε / N) · 100`, unrounded.
pub fn accuracy(errors: &[bool]) -> Result<f64, EvalError> {
    if errors.is_empty() {
        return Err(EvalError::Empty);
    }
    let wrong = errors.iter().filter(|e| **e).count();
    Ok((1.0 - wrong as f64 / errors.len() as f64) * 100.0)
}

/// Rounds a percentage to one decimal for reporting.
pub fn round1(pct: f64) -> f64 {
    (pct * 10.0).round() / 10.0
}

pub fn fold_seed(master: u64, held_out_id: &str) -> u64 {
    derive_seed(master, held_out_id)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub held_out_id: String,
    pub predicted: Option<Label>,
    pub actual: Label,
    pub score: Option<f64>,
    pub epochs_to_convergence: usize,
    pub converged: bool,
    /// Why training was refused, if it was.
    pub refused: Option<String>,
}

impl FoldResult {
    pub fn is_error(&self) -> bool {
        self.refused.is_some() || !self.converged || self.predicted != Some(self.actual)
    }
}

/// What a classifier reports for one held-out sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldPrediction {
    pub label: Label,
    pub score: f64,
    pub epochs: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoocvOutcome {
    pub folds: Vec<FoldResult>,
    pub accuracy: f64,
    pub valid_folds: usize,
}

/// Generic LOO harness: `classify(training, held_out, fold_seed)` per fold.
pub fn loocv_with<F>(dataset: &Dataset, master_seed: u64, classify: F) -> Result<LoocvOutcome, EvalError>
where
    F: Fn(&[&Sample], &Sample, u64) -> Result<FoldPrediction, String>,
{
    let n = dataset.len();
    if n < 2 {
        return Err(EvalError::TooFewSamples(n));
    }
    let samples = dataset.samples();
    let folds: Vec<FoldResult> = samples
        .iter()
        .enumerate()
        .map(|(i, held)| {
            let training: Vec<&Sample> = samples
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, s)| s)
                .collect();
            match classify(&training, held, fold_seed(master_seed, &held.id)) {
                Ok(p) => FoldResult {
                    held_out_id: held.id.clone(),
                    predicted: Some(p.label),
                    actual: held.label,
                    score: Some(p.score),
                    epochs_to_convergence: p.epochs,
                    converged: p.converged,
                    refused: None,
                },
                Err(reason) => FoldResult {
                    held_out_id: held.id.clone(),
                    predicted: None,
                    actual: held.label,
                    score: None,
                    epochs_to_convergence: 0,
                    converged: false,
                    refused: Some(reason),
                },
            }
        })
        .collect();
    let errors: Vec<bool> = folds.iter().map(FoldResult::is_error).collect();
    let valid_folds = folds.iter().filter(|f| f.refused.is_none()).count();
    Ok(LoocvOutcome {
        accuracy: accuracy(&errors)?,
        folds,
        valid_folds,
    })
}

/// LOO with the RBF classifier; `config.rng_seed` is the master seed.
pub fn loocv(dataset: &Dataset, config: &TrainConfig) -> Result<LoocvOutcome, EvalError> {
    loocv_with(dataset, config.rng_seed, |training, held, seed| {
        let rows: Vec<&[f64]> = training.iter().map(|s| s.values.as_slice()).collect();
        let labels: Vec<Label> = training.iter().map(|s| s.label).collect();
        let cfg = TrainConfig {
            rng_seed: seed,
            ..config.clone()
        };
        let model = rbf::train(&rows, &labels, &cfg).map_err(|e| e.to_string())?;
        let p = model.predict(&held.values).map_err(|e| e.to_string())?;
        Ok(FoldPrediction {
            label: p.label,
            score: p.score,
            epochs: model.diagnostics.epochs_to_convergence(),
            converged: model.diagnostics.converged,
        })
    })
}

/// LOO with a constant classifier predicting each training fold's majority
/// class (ties go to `bad`).
pub fn majority_baseline(dataset: &Dataset) -> Result<LoocvOutcome, EvalError> {
    loocv_with(dataset, 0, |training, _, _| {
        let bad = training.iter().filter(|s| s.label == Label::Bad).count();
        let label = if 2 * bad >= training.len() {
            Label::Bad
        } else {
            Label::Good
        };
        Ok(FoldPrediction {
            label,
            score: label.target(),
            epochs: 0,
            converged: true,
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoocvReport {
    pub criterion: String,
    pub hidden_units: usize,
    pub repeats: usize,
    pub n: usize,
    pub bad_fraction: f64,
    pub master_seed: u64,
    pub seeds: Vec<u64>,
    /// Per-repeat accuracy, percent.
    pub accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub min_accuracy: f64,
    pub max_accuracy: f64,
    pub valid_folds: Vec<usize>,
    pub non_converged_folds: usize,
    /// Every fold of every repeat was refused.
    pub not_applicable: bool,
    pub refusal: Option<String>,
    pub folds: Vec<Vec<FoldResult>>,
}

impl LoocvReport {
    /// Mean accuracy to one decimal, or `N/A`.
    pub fn mean_label(&self) -> String {
        if self.not_applicable {
            "N/A".to_owned()
        } else {
            format!("{:.1}%", self.mean_accuracy)
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "criterion {} | bad swings {:.1}% | N = {} | hidden units {} | repeats {}",
            self.criterion, self.bad_fraction, self.n, self.hidden_units, self.repeats
        );
        let _ = writeln!(s, "master seed {}", self.master_seed);
        for (r, (acc, seed)) in self.accuracies.iter().zip(&self.seeds).enumerate() {
            let _ = writeln!(s, "repeat {:>2}  seed {:>20}  accuracy {:.1}%", r + 1, seed, acc);
        }
        let _ = writeln!(
            s,
            "mean {}  (std {:.2}, min {:.1}%, max {:.1}%)",
            self.mean_label(),
            self.std_accuracy,
            self.min_accuracy,
            self.max_accuracy
        );
        if let Some(reason) = &self.refusal {
            let _ = writeln!(s, "refused: {reason}");
        }
        s
    }
}

fn summary(values: &[f64]) -> (f64, f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, var.sqrt(), min, max)
}

/// Runs LOO `repeats` times with seeds drawn from a stream rooted at `master_seed`.
pub fn repeat_loocv(
    dataset: &Dataset,
    criterion: &str,
    config: &TrainConfig,
    repeats: usize,
    master_seed: u64,
) -> Result<LoocvReport, EvalError> {
    if repeats == 0 {
        return Err(EvalError::NoRepeats);
    }
    let seeds: Vec<u64> = (0..repeats as u64).map(|r| stream_seed(master_seed, r)).collect();
    let mut accuracies = Vec::with_capacity(repeats);
    let mut valid_folds = Vec::with_capacity(repeats);
    let mut folds = Vec::with_capacity(repeats);
    for &seed in &seeds {
        let cfg = TrainConfig {
            rng_seed: seed,
            ..config.clone()
        };
        let outcome = loocv(dataset, &cfg)?;
        accuracies.push(outcome.accuracy);
        valid_folds.push(outcome.valid_folds);
        folds.push(outcome.folds);
    }
    let (mean, std, min, max) = summary(&accuracies);
    let all: Vec<&FoldResult> = folds.iter().flatten().collect();
    Ok(LoocvReport {
        criterion: criterion.to_owned(),
        hidden_units: config.hidden_units,
        repeats,
        n: dataset.len(),
        bad_fraction: dataset.bad_fraction(),
        master_seed,
        seeds,
        mean_accuracy: mean,
        std_accuracy: std,
        min_accuracy: min,
        max_accuracy: max,
        accuracies,
        valid_folds: valid_folds.clone(),
        non_converged_folds: all
            .iter()
            .filter(|f| f.refused.is_none() && !f.converged)
            .count(),
        not_applicable: valid_folds.iter().all(|v| *v == 0),
        refusal: all.iter().find_map(|f| f.refused.clone()),
        folds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSummary {
    pub name: String,
    pub n: usize,
    pub bad_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub repeats: usize,
    pub max_epochs: usize,
    pub master_seed: u64,
    pub hidden_units: Vec<usize>,
    pub criteria: Vec<CriterionSummary>,
    /// One report per (criterion, hidden units), criterion-major.
    pub reports: Vec<LoocvReport>,
}

impl SweepTable {
    pub fn report(&self, criterion: &str, h: usize) -> Option<&LoocvReport> {
        self.reports
            .iter()
            .find(|r| r.criterion == criterion && r.hidden_units == h)
    }

    /// Rows of hidden units, one accuracy column per criterion.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let n: BTreeSet<usize> = self.criteria.iter().map(|c| c.n).collect();
        let n = n
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("/");
        let _ = writeln!(s, "Repeated leave-one-out cross-validation, RBF classifier");
        let _ = writeln!(
            s,
            "training epochs: {} | input vectors: {} | repeated LOO runs: {} | master seed: {}",
            self.max_epochs, n, self.repeats, self.master_seed
        );
        let _ = writeln!(s);
        let headers: Vec<String> = std::iter::once("hidden units".to_owned())
            .chain(
                self.criteria
                    .iter()
                    .map(|c| format!("{} (bad {:.1}%)", c.name, c.bad_fraction)),
            )
            .collect();
        let mut rows: Vec<Vec<String>> = Vec::new();
        for &h in &self.hidden_units {
            let mut row = vec![h.to_string()];
            for c in &self.criteria {
                row.push(
                    self.report(&c.name, h)
                        .map_or_else(|| "-".to_owned(), LoocvReport::mean_label),
                );
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..headers.len())
            .map(|k| {
                rows.iter()
                    .map(|r| r[k].len())
                    .chain(std::iter::once(headers[k].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_owned()
        };
        let _ = writeln!(s, "{}", line(&headers));
        let _ = writeln!(
            s,
            "{}",
            widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ")
        );
        for row in &rows {
            let _ = writeln!(s, "{}", line(row));
        }
        s
    }
}

/// One repeated-LOO report per (criterion, hidden units).
pub fn sweep_hidden_units(
    datasets: &[(String, Dataset)],
    hidden_units: &[usize],
    repeats: usize,
    config: &TrainConfig,
    master_seed: u64,
) -> Result<SweepTable, EvalError> {
    let mut reports = Vec::new();
    for (criterion, data) in datasets {
        for &h in hidden_units {
            let cfg = TrainConfig {
                hidden_units: h,
                ..config.clone()
            };
            reports.push(repeat_loocv(data, criterion, &cfg, repeats, master_seed)?);
        }
    }
    Ok(SweepTable {
        repeats,
        max_epochs: config.max_epochs,
        master_seed,
        hidden_units: hidden_units.to_vec(),
        criteria: datasets
            .iter()
            .map(|(name, d)| CriterionSummary {
                name: name.clone(),
                n: d.len(),
                bad_fraction: d.bad_fraction(),
            })
            .collect(),
        reports,
    })
}
