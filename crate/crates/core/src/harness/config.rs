//! Experiment configuration, read from TOML or JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{QfiltError, Result};
use crate::exec::Execution;
use crate::nmqa::NmqaConfig;
use crate::simworld::{make_field, make_geometry, FieldKind, Geometry, GeometryKind, TrueField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldConfig {
    pub geometry: GeometryKind,
    pub d: usize,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    pub field: FieldKind,
    /// Add truncated Gaussian noise to the simulated Born probability.
    #[serde(default)]
    pub noise_on: bool,
}

fn default_spacing() -> f64 {
    1.0
}

impl WorldConfig {
    pub fn build(&self) -> Result<(Geometry, TrueField)> {
        let geometry = make_geometry(self.geometry, self.d, self.spacing)?;
        let field = make_field(self.field, &geometry)?;
        Ok((geometry, field))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label written to the `case` column.
    pub case: String,
    /// Filter settings; `n_alpha` is replaced by each entry of `n_alpha_grid`.
    pub nmqa: NmqaConfig,
    pub world: WorldConfig,
    pub n_alpha_grid: Vec<usize>,
    pub repetitions: usize,
    pub t_max: usize,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub execution: Execution,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("qfilt-out")
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| QfiltError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| QfiltError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Picks the format from the extension; anything other than `.json` is read as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_alpha_grid.is_empty() {
            return Err(QfiltError::Config("n_alpha_grid is empty".into()));
        }
        if self.n_alpha_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QfiltError::Config("n_alpha_grid must be strictly increasing".into()));
        }
        if self.n_alpha_grid[0] == 0 {
            return Err(QfiltError::Config("n_alpha must be positive".into()));
        }
        if self.repetitions == 0 || self.t_max == 0 {
            return Err(QfiltError::Config("repetitions and t_max must be positive".into()));
        }
        for &n in &self.n_alpha_grid {
            self.cell_config(n).validate()?;
        }
        self.world.build()?;
        Ok(())
    }

    /// Filter settings for one particle count.
    pub fn cell_config(&self, n_alpha: usize) -> NmqaConfig {
        let mut cfg = self.nmqa.clone();
        cfg.n_alpha = n_alpha;
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
case = "1d-linear"
n_alpha_grid = [3, 9, 15]
repetitions = 4
t_max = 10
seed = 7

[nmqa]
beta_strategy = "trunc_gauss"
sigma_v = 9.0e-8
sigma_f = 2.6e-5
lambda1 = 0.88
lambda2 = 0.72

[world]
geometry = "chain_1d"
d = 25
field = "linear_1d"
"#;

    #[test]
    fn parses_toml() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.n_alpha_grid, vec![3, 9, 15]);
        assert_eq!(cfg.cell_config(9).effective_n_beta(), 6);
        assert_eq!(cfg.execution, Execution::Parallel);
    }

    #[test]
    fn json_mirror_round_trips() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json_str(&json).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = SAMPLE.replace("seed = 7", "seed = 7\nsede = 8");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
        let bad = SAMPLE.replace("d = 25", "d = 25\nnoise = true");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn rejects_unsorted_grid() {
        let bad = SAMPLE.replace("[3, 9, 15]", "[3, 15, 9]");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
        let bad = SAMPLE.replace("[3, 9, 15]", "[]");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
    }
}
