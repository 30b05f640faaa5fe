//! Run configuration: a TOML or JSON file, overridden by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swingflow::kinematics::SweetSpotMethod;
use swingflow::rbf::TrainConfig;
use swingflow::SourceConvention;

use crate::error::{CliError, CliResult, Classify};

pub const DEFAULT_SWEEP: [usize; 5] = [2, 3, 4, 5, 6];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub clips_dir: Option<PathBuf>,
    pub roi_file: Option<PathBuf>,
    pub labels_file: Option<PathBuf>,
    pub features_file: Option<PathBuf>,
    pub model_file: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub source_convention: SourceConvention,
    pub scale: f64,
    pub sample_rate_hz: f64,
    pub sweet_spot: SweetSpotMethod,
    pub criterion: Option<String>,
    pub repeats: usize,
    /// Master seed for every seeded stage.
    pub seed: u64,
    pub hidden_units_sweep: Vec<usize>,
    pub strict: bool,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            clips_dir: None,
            roi_file: None,
            labels_file: None,
            features_file: None,
            model_file: None,
            output: None,
            source_convention: SourceConvention::Canonical,
            scale: 1.0,
            sample_rate_hz: 50.0,
            sweet_spot: SweetSpotMethod::Circumcenter,
            criterion: None,
            repeats: swingflow::eval::DEFAULT_REPEATS,
            seed: 0,
            hidden_units_sweep: DEFAULT_SWEEP.to_vec(),
            strict: false,
            train: TrainConfig::default(),
        }
    }
}

impl RunConfig {
    /// Reads `.json` as JSON and anything else as TOML.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
            .io()?;
        let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(anyhow::Error::from)
        } else {
            toml::from_str(&text).map_err(anyhow::Error::from)
        };
        parsed
            .map_err(|e| anyhow::anyhow!("config {}: {e}", path.display()))
            .input()
    }

    pub fn require<'a>(value: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a PathBuf> {
        value
            .as_ref()
            .ok_or_else(|| CliError::usage(format!("missing {flag} (flag or config)")))
    }
}

/// Parses a kebab-case enum value through its serde representation.
pub fn parse_kebab<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use swingflow::rbf::WidthHeuristic;

    #[test]
    fn toml_and_json_agree() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("run.toml");
        std::fs::write(
            &t,
            "seed = 7\nsource_convention = \"lh-xzy\"\n[train]\nhidden_units = 3\nwidth_heuristic = \"global\"\n",
        )
        .unwrap();
        let a = RunConfig::load(&t).unwrap();
        assert_eq!(a.seed, 7);
        assert_eq!(a.source_convention, SourceConvention::LhXzy);
        assert_eq!(a.train.hidden_units, 3);
        assert_eq!(a.train.width_heuristic, WidthHeuristic::Global);
        assert_eq!(a.repeats, 12);
        let j = dir.path().join("run.json");
        std::fs::write(&j, serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(RunConfig::load(&j).unwrap(), a);
    }

    #[test]
    fn unknown_keys_are_input_errors() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("run.toml");
        std::fs::write(&t, "seeed = 1\n").unwrap();
        assert_eq!(RunConfig::load(&t).unwrap_err().kind, crate::error::Failure::Input);
    }

    #[test]
    fn kebab_values() {
        assert_eq!(parse_kebab::<WidthHeuristic>("nearest-center").unwrap(), WidthHeuristic::NearestCenter);
        assert!(parse_kebab::<WidthHeuristic>("widest").is_err());
    }
}
