//! Tuned filter settings for the built-in worlds and the `demo` cases.

use std::str::FromStr;

use crate::error::{QfiltError, Result};
use crate::exec::Execution;
use crate::nmqa::{BetaStrategy, NmqaConfig};
use crate::simworld::{FieldKind, GeometryKind};

use super::config::{ExperimentConfig, WorldConfig};

pub const DEFAULT_N_ALPHA_GRID: [usize; 5] = [3, 9, 15, 21, 30];

/// `(sigma_v, sigma_f, lambda1, lambda2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunedParams {
    pub sigma_v: f64,
    pub sigma_f: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

const fn p(sigma_v: f64, sigma_f: f64, lambda1: f64, lambda2: f64) -> TunedParams {
    TunedParams {
        sigma_v,
        sigma_f,
        lambda1,
        lambda2,
    }
}

/// Tuned settings for a field family and array size, where known.
pub fn tuned_params(field: FieldKind, d: usize, strategy: BetaStrategy) -> Option<TunedParams> {
    use BetaStrategy::{TruncGauss, Uniform};
    use FieldKind::{Gaussian2d, Linear1d, Square2d};
    Some(match (field, d, strategy) {
        (Linear1d, 25, Uniform) => p(6.0e-9, 0.10, 0.88, 0.72),
        (Linear1d, 25, TruncGauss) => p(9.0e-8, 2.6e-5, 0.88, 0.72),
        (Square2d, 25, Uniform) => p(7.1e-7, 0.04, 0.88, 0.72),
        (Square2d, 25, TruncGauss) => p(8.9e-7, 1.9e-9, 0.88, 0.72),
        (Gaussian2d, 25, Uniform) => p(5.9e-9, 0.10, 0.72, 0.95),
        (Gaussian2d, 25, TruncGauss) => p(0.77, 4.6e-6, 0.72, 0.95),
        (Square2d, 9, Uniform) => p(7.1e-7, 0.05, 0.93, 0.68),
        (Square2d, 9, TruncGauss) => p(6.3e-7, 7.9e-7, 0.95, 0.84),
        (Square2d, 16, Uniform) => p(4.2e-3, 2.6e-4, 0.88, 0.72),
        (Square2d, 16, TruncGauss) => p(4.2e-3, 2.6e-4, 0.93, 0.68),
        _ => return None,
    })
}

/// Settings tuned with both sharing weights switched off (`lambda1 = lambda2 = 0`).
pub fn no_sharing_params(field: FieldKind, d: usize, strategy: BetaStrategy) -> Option<TunedParams> {
    use BetaStrategy::{TruncGauss, Uniform};
    use FieldKind::{Gaussian2d, Square2d};
    Some(match (field, d, strategy) {
        (Square2d, 25, Uniform) => p(7.1e-7, 0.047, 0.0, 0.0),
        (Square2d, 25, TruncGauss) => p(8.9e-7, 1.9e-9, 0.0, 0.0),
        (Gaussian2d, 25, Uniform) => p(5.9e-9, 0.096, 0.0, 0.0),
        (Gaussian2d, 25, TruncGauss) => p(0.77, 4.6e-6, 0.0, 0.0),
        (Square2d, 16, _) => p(4.2e-3, 2.6e-4, 0.0, 0.0),
        (Square2d, 9, Uniform) => p(7.1e-7, 0.047, 0.0, 0.0),
        (Square2d, 9, TruncGauss) => p(6.3e-7, 7.9e-7, 0.0, 0.0),
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoCase {
    Linear1d,
    Square2d,
    Gaussian2d,
}

impl DemoCase {
    pub const ALL: [DemoCase; 3] = [DemoCase::Linear1d, DemoCase::Square2d, DemoCase::Gaussian2d];

    pub fn name(self) -> &'static str {
        match self {
            DemoCase::Linear1d => "1d-linear",
            DemoCase::Square2d => "2d-square",
            DemoCase::Gaussian2d => "2d-gaussian",
        }
    }

    pub fn world(self) -> WorldConfig {
        let (geometry, field) = match self {
            DemoCase::Linear1d => (GeometryKind::Chain1d, FieldKind::Linear1d),
            DemoCase::Square2d => (GeometryKind::Grid2d, FieldKind::Square2d),
            DemoCase::Gaussian2d => (GeometryKind::Grid2d, FieldKind::Gaussian2d),
        };
        WorldConfig {
            geometry,
            d: 25,
            spacing: 1.0,
            field,
            noise_on: false,
        }
    }
}

impl FromStr for DemoCase {
    type Err = QfiltError;

    fn from_str(s: &str) -> Result<Self> {
        DemoCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| QfiltError::Config(format!("unknown demo case {s:?}")))
    }
}

/// Scaling study for `world` with the tuned settings for `strategy`.
pub fn tuned_experiment(
    case: &str,
    world: WorldConfig,
    strategy: BetaStrategy,
    params: TunedParams,
    repetitions: usize,
    t_max: usize,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        case: case.to_string(),
        nmqa: NmqaConfig::new(strategy, params.sigma_v, params.sigma_f, params.lambda1, params.lambda2),
        world,
        n_alpha_grid: DEFAULT_N_ALPHA_GRID.to_vec(),
        repetitions,
        t_max,
        seed,
        output_dir: "qfilt-out".into(),
        execution: Execution::Parallel,
    }
}

/// Uniform and truncated-Gaussian studies for a demo case.
pub fn demo_experiments(case: DemoCase, repetitions: usize, t_max: usize, seed: u64) -> Vec<ExperimentConfig> {
    let world = case.world();
    [BetaStrategy::Uniform, BetaStrategy::TruncGauss]
        .into_iter()
        .map(|strategy| {
            let params = tuned_params(world.field, world.d, strategy).expect("demo worlds are tuned");
            tuned_experiment(case.name(), world.clone(), strategy, params, repetitions, t_max, seed)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_cases_parse_and_validate() {
        for case in DemoCase::ALL {
            assert_eq!(case.name().parse::<DemoCase>().unwrap(), case);
            for cfg in demo_experiments(case, 2, 5, 1) {
                cfg.validate().unwrap();
            }
        }
        assert!("3d-cube".parse::<DemoCase>().is_err());
    }

    #[test]
    fn square_sizes_have_settings() {
        for d in [9, 16, 25] {
            for s in [BetaStrategy::Uniform, BetaStrategy::TruncGauss] {
                assert!(tuned_params(FieldKind::Square2d, d, s).is_some());
                let ns = no_sharing_params(FieldKind::Square2d, d, s).unwrap();
                assert_eq!((ns.lambda1, ns.lambda2), (0.0, 0.0));
            }
        }
    }
}
