use serde::{Deserialize, Serialize};

use crate::error::{QfiltError, Result};
use crate::measurement::DEFAULT_BOUND_B;

/// How beta particles (candidate neighbourhood radii) are drawn each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaStrategy {
    /// Fresh draws from the uniform prior on the radius interval.
    Uniform,
    /// Truncated Gaussian around the parent's radius with variance `r * C`.
    TruncGauss,
}

impl BetaStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            BetaStrategy::Uniform => "uniform",
            BetaStrategy::TruncGauss => "trunc_gauss",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmqaConfig {
    /// Blend weight base for data messages in the data-association statistic.
    pub lambda1: f64,
    /// Blend weight base for neighbour smearing.
    pub lambda2: f64,
    /// Quantization-noise variance.
    pub sigma_v: f64,
    #[serde(default = "default_bound_b")]
    pub bound_b: f64,
    /// Mean of the smearing-error model.
    #[serde(default)]
    pub mu_f: f64,
    /// Variance of the smearing-error model.
    pub sigma_f: f64,
    #[serde(default = "default_n_alpha")]
    pub n_alpha: usize,
    /// Defaults to `round(2 n_alpha / 3)`.
    #[serde(default)]
    pub n_beta: Option<usize>,
    #[serde(default = "default_k0")]
    pub k0: f64,
    pub beta_strategy: BetaStrategy,
    /// Radius interval. Defaults to `[min separation, r_max_multiple * max separation]`.
    #[serde(default)]
    pub r_bounds: Option<[f64; 2]>,
    #[serde(default = "default_r_max_multiple")]
    pub r_max_multiple: f64,
}

fn default_bound_b() -> f64 {
    DEFAULT_BOUND_B
}

fn default_n_alpha() -> usize {
    15
}

fn default_k0() -> f64 {
    1.0
}

fn default_r_max_multiple() -> f64 {
    3.0
}

/// `round(2 n_alpha / 3)`, at least one.
pub fn default_n_beta(n_alpha: usize) -> usize {
    ((2.0 * n_alpha as f64 / 3.0).round() as usize).max(1)
}

impl NmqaConfig {
    pub fn new(
        beta_strategy: BetaStrategy,
        sigma_v: f64,
        sigma_f: f64,
        lambda1: f64,
        lambda2: f64,
    ) -> Self {
        Self {
            lambda1,
            lambda2,
            sigma_v,
            bound_b: DEFAULT_BOUND_B,
            mu_f: 0.0,
            sigma_f,
            n_alpha: default_n_alpha(),
            n_beta: None,
            k0: default_k0(),
            beta_strategy,
            r_bounds: None,
            r_max_multiple: default_r_max_multiple(),
        }
    }

    pub fn with_particles(mut self, n_alpha: usize) -> Self {
        self.n_alpha = n_alpha;
        self
    }

    pub fn effective_n_beta(&self) -> usize {
        self.n_beta.unwrap_or_else(|| default_n_beta(self.n_alpha))
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(QfiltError::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("lambda1", self.lambda1)?;
        unit("lambda2", self.lambda2)?;
        if !(self.sigma_v >= 0.0) {
            return Err(QfiltError::Config("sigma_v must be non-negative".into()));
        }
        if !(self.sigma_f > 0.0) {
            return Err(QfiltError::Config("sigma_f must be positive".into()));
        }
        if self.n_alpha == 0 || self.effective_n_beta() == 0 {
            return Err(QfiltError::Config("particle numbers must be positive".into()));
        }
        if !(self.k0 >= 1.0) {
            return Err(QfiltError::Config(format!("k0 must be at least 1, got {}", self.k0)));
        }
        if let Some([lo, hi]) = self.r_bounds {
            if !(lo > 0.0 && lo <= hi) {
                return Err(QfiltError::Config(format!("invalid r_bounds [{lo}, {hi}]")));
            }
        }
        if !(self.r_max_multiple > 0.0) {
            return Err(QfiltError::Config("r_max_multiple must be positive".into()));
        }
        Ok(())
    }
}
