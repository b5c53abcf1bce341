//! Bootstrap particle filter over a scalar state seen through single-shot
//! projective measurements.
//!
//! Each step propagates particles through the transition kernel, weights them by
//! the measurement likelihood, draws `n` offspring multinomially and resets the
//! weights to `1/n`.

use crate::ensemble::WeightedEnsemble;
use crate::error::{QfiltError, Result};
use crate::measurement::{MeasurementModel, Ramsey, SignalMap};
use crate::resample::{multinomial_resample, uniform_resample};
use crate::rng::SeededRng;

pub trait TransitionKernel: Send + Sync {
    fn propagate(&self, position: f64, rng: &mut SeededRng) -> f64;

    /// Identity kernel: positions never move.
    fn is_static(&self) -> bool {
        false
    }
}

/// Dirac-delta kernel for a field that is constant over the measurement record.
#[derive(Debug, Clone, Copy, Default)]
pub struct StaticKernel;

impl TransitionKernel for StaticKernel {
    fn propagate(&self, position: f64, _rng: &mut SeededRng) -> f64 {
        position
    }

    fn is_static(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone)]
pub struct BootstrapFilter<K = StaticKernel, S = Ramsey> {
    ensemble: WeightedEnsemble<f64>,
    model: MeasurementModel,
    signal: S,
    kernel: K,
    t: usize,
    degenerate_steps: usize,
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepReport {
    /// All weights vanished and the step fell back to uniform resampling.
    pub degenerate: bool,
}

impl BootstrapFilter<StaticKernel, Ramsey> {
    /// Static-kernel Ramsey phase filter with `n` particles uniform on `prior_bounds`.
    pub fn init(
        prior_bounds: (f64, f64),
        n: usize,
        model: MeasurementModel,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        Self::with_parts(prior_bounds, n, model, Ramsey, StaticKernel, rng)
    }
}

impl<K: TransitionKernel, S: SignalMap> BootstrapFilter<K, S> {
    pub fn with_parts(
        prior_bounds: (f64, f64),
        n: usize,
        model: MeasurementModel,
        signal: S,
        kernel: K,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        let (lo, hi) = prior_bounds;
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(QfiltError::Config(format!(
                "prior interval [{lo}, {hi}] is empty"
            )));
        }
        if n == 0 {
            return Err(QfiltError::Config("particle number must be at least 1".into()));
        }
        let positions = (0..n).map(|_| lo + (hi - lo) * rng.uniform()).collect();
        Ok(Self {
            ensemble: WeightedEnsemble::uniform(positions, 0)?,
            model,
            signal,
            kernel,
            t: 0,
            degenerate_steps: 0,
        })
    }

    pub fn ensemble(&self) -> &WeightedEnsemble<f64> {
        &self.ensemble
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn degenerate_steps(&self) -> usize {
        self.degenerate_steps
    }

    pub fn model(&self) -> &MeasurementModel {
        &self.model
    }

    /// Weighted mean and variance of the current ensemble.
    pub fn empirical_moments(&self) -> (f64, f64) {
        self.ensemble.moments()
    }

    pub fn step(&mut self, outcome: bool, rng: &mut SeededRng) -> Result<StepReport> {
        let n = self.ensemble.len();
        let propagated: Vec<f64> = if self.kernel.is_static() {
            self.ensemble.positions().to_vec()
        } else {
            self.ensemble
                .positions()
                .iter()
                .map(|x| self.kernel.propagate(*x, rng))
                .collect()
        };
        let weights: Vec<f64> = propagated
            .iter()
            .map(|x| self.model.likelihood(outcome, self.signal.forward(*x)).max(0.0))
            .collect();

        let (offspring, degenerate) = match multinomial_resample(&weights, n, rng) {
            Ok(out) => (out, false),
            Err(QfiltError::DegenerateWeights) => (uniform_resample(n, n, rng), true),
            Err(e) => return Err(e),
        };
        if degenerate {
            self.degenerate_steps += 1;
        }
        let positions = offspring
            .parent_indices
            .iter()
            .map(|&p| propagated[p])
            .collect();
        self.t += 1;
        self.ensemble = WeightedEnsemble::uniform(positions, self.t)?;
        Ok(StepReport { degenerate })
    }

    pub fn run(&mut self, outcomes: &[bool], rng: &mut SeededRng) -> Result<()> {
        for &y in outcomes {
            self.step(y, rng)?;
        }
        Ok(())
    }
}
