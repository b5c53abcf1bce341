//! Amplitude-quantized projective measurement model.
//!
//! A single shot returns `1` with probability `s(x) + v + 1/2`, where `s` is the
//! signal map of the state and `v` is quantization noise: a zero-mean Gaussian of
//! variance `sigma_v` convolved with a uniform window on `[-b, b]`. Integrating the
//! noise out leaves a likelihood that is the ideal Born probability scaled by a
//! single constant `rho0` in `[0, 1]`.

use std::f64::consts::PI;

use crate::error::{QfiltError, Result};
use crate::rng::SeededRng;

/// Quantization window half-width used unless configured otherwise.
pub const DEFAULT_BOUND_B: f64 = 0.5;

/// Tolerance on `|z| <= 1/2` before the inverse map flags its input.
pub const INVERSE_RANGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementModel {
    sigma_v: f64,
    bound_b: f64,
    rho0: f64,
}

impl MeasurementModel {
    /// Symmetric window `[-bound_b, bound_b]` with noise variance `sigma_v`.
    pub fn new(bound_b: f64, sigma_v: f64) -> Result<Self> {
        let rho0 = compute_rho0(bound_b, sigma_v)?;
        Ok(Self {
            sigma_v,
            bound_b,
            rho0,
        })
    }

    /// Explicit window `[a, b]`. Only the symmetric case `a = -b` is supported.
    pub fn with_bounds(a: f64, b: f64, sigma_v: f64) -> Result<Self> {
        if (a + b).abs() > 1e-12 {
            return Err(QfiltError::InvalidModel(format!(
                "asymmetric quantization bounds [{a}, {b}] are not supported"
            )));
        }
        Self::new(b, sigma_v)
    }

    /// Default window `b = 1/2`.
    pub fn with_sigma_v(sigma_v: f64) -> Result<Self> {
        Self::new(DEFAULT_BOUND_B, sigma_v)
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v
    }

    pub fn bound_b(&self) -> f64 {
        self.bound_b
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn set_sigma_v(&mut self, sigma_v: f64) -> Result<()> {
        *self = Self::new(self.bound_b, sigma_v)?;
        Ok(())
    }

    /// True in the regime `b <= 3 sigma_v`, where discretization discards too much
    /// of the noise distribution for the model to be trusted.
    pub fn model_failure_warning(&self) -> bool {
        self.bound_b <= 3.0 * self.sigma_v
    }

    pub fn likelihood(&self, outcome: bool, s_value: f64) -> f64 {
        likelihood(outcome, s_value, self.rho0)
    }
}

/// Closed form of the retained-probability scalar `rho0`.
///
/// With `u = 2b / sqrt(2 sigma_v)`:
/// `rho0 = erf(u) + exp(-u^2) / (u sqrt(pi)) - 1 / (u sqrt(pi))`.
/// `sigma_v = 0` is the exact limit `rho0 = 1`.
pub fn compute_rho0(bound_b: f64, sigma_v: f64) -> Result<f64> {
    if !(bound_b > 0.0) || !bound_b.is_finite() {
        return Err(QfiltError::InvalidModel(format!(
            "quantization bound must be positive, got {bound_b}"
        )));
    }
    if !(sigma_v >= 0.0) {
        return Err(QfiltError::InvalidModel(format!(
            "noise variance must be non-negative, got {sigma_v}"
        )));
    }
    if sigma_v == 0.0 {
        return Ok(1.0);
    }
    if sigma_v.is_infinite() {
        return Ok(0.0);
    }
    let width = (2.0 * sigma_v).sqrt();
    let u = 2.0 * bound_b / width;
    let root_pi = PI.sqrt();
    let rho = libm::erf(u) + (width / (2.0 * bound_b)) * (-u * u).exp() / root_pi
        - (1.0 / (2.0 * bound_b)) * width / root_pi;
    Ok(rho.clamp(0.0, 1.0))
}

/// Likelihood of `outcome` given signal value `s_value` in `[-1/2, 1/2]`.
///
/// `likelihood(false, s) + likelihood(true, s) == rho0` for every `s`.
pub fn likelihood(outcome: bool, s_value: f64, rho0: f64) -> f64 {
    let half = 0.5 * rho0;
    if outcome {
        half + rho0 * s_value
    } else {
        half - rho0 * s_value
    }
}

/// Single Bernoulli shot; `true` is the `|1>` outcome.
pub fn sample_outcome(born_probability: f64, rng: &mut SeededRng) -> bool {
    let p = if born_probability.is_nan() {
        0.5
    } else {
        born_probability.clamp(0.0, 1.0)
    };
    rng.uniform() < p
}

/// Result of inverting the signal map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inverted {
    pub value: f64,
    /// The input was outside the map's range by more than [`INVERSE_RANGE_TOL`].
    pub out_of_range: bool,
}

/// Bounded, continuous, invertible map from state to signal amplitude.
pub trait SignalMap: Send + Sync {
    /// Signal amplitude in `[-1/2, 1/2]`.
    fn forward(&self, state: f64) -> f64;
    fn inverse(&self, z: f64) -> Inverted;
    /// Closed state interval on which `forward` is invertible.
    fn domain(&self) -> (f64, f64);
}

/// Relative-phase Ramsey map `s(F) = cos(F) / 2` on `[0, pi]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Ramsey;

impl SignalMap for Ramsey {
    fn forward(&self, state: f64) -> f64 {
        ramsey_forward(state)
    }

    fn inverse(&self, z: f64) -> Inverted {
        ramsey_inverse(z)
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, PI)
    }
}

pub fn ramsey_forward(phase: f64) -> f64 {
    0.5 * phase.cos()
}

/// `arccos(2 z)` with `z` clamped into `[-1/2, 1/2]`.
pub fn ramsey_inverse(z: f64) -> Inverted {
    let out_of_range = z.abs() > 0.5 + INVERSE_RANGE_TOL || z.is_nan();
    let clamped = if z.is_nan() { 0.0 } else { z.clamp(-0.5, 0.5) };
    Inverted {
        value: (2.0 * clamped).clamp(-1.0, 1.0).acos(),
        out_of_range,
    }
}

/// Ideal Born probability of `|1>` under the Ramsey map, `cos(F)/2 + 1/2`.
pub fn ramsey_born_probability(phase: f64) -> f64 {
    ramsey_forward(phase) + 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho0_limits() {
        assert_eq!(compute_rho0(0.5, 0.0).unwrap(), 1.0);
        assert!(compute_rho0(0.5, 1e-14).unwrap() > 1.0 - 1e-6);
        assert!(compute_rho0(0.5, 1e8).unwrap() < 1e-3);
        assert_eq!(compute_rho0(0.5, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn rho0_rejects_bad_bounds() {
        assert!(compute_rho0(0.0, 0.1).is_err());
        assert!(compute_rho0(-1.0, 0.1).is_err());
        assert!(compute_rho0(0.5, -0.1).is_err());
        assert!(MeasurementModel::with_bounds(-0.3, 0.5, 0.01).is_err());
        assert!(MeasurementModel::with_bounds(-0.5, 0.5, 0.01).is_ok());
    }

    #[test]
    fn rho0_decreases_with_noise() {
        let mut prev = 1.0;
        for k in -9..=3 {
            let r = compute_rho0(0.5, 10f64.powi(k)).unwrap();
            assert!(r < prev && r >= 0.0);
            prev = r;
        }
    }

    #[test]
    fn likelihood_examples() {
        assert_eq!(likelihood(true, 0.0, 1.0), 0.5);
        assert_eq!(likelihood(true, 0.5, 1.0), 1.0);
        assert_eq!(likelihood(false, 0.5, 1.0), 0.0);
        let rho = 0.73;
        for s in [-0.5, -0.2, 0.0, 0.11, 0.5] {
            let total = likelihood(false, s, rho) + likelihood(true, s, rho);
            assert!((total - rho).abs() < 1e-15);
        }
    }

    #[test]
    fn failure_regime_flag() {
        assert!(MeasurementModel::new(0.5, 0.2).unwrap().model_failure_warning());
        assert!(!MeasurementModel::new(0.5, 0.1).unwrap().model_failure_warning());
    }

    #[test]
    fn ramsey_endpoints() {
        assert!((ramsey_forward(0.0) - 0.5).abs() < 1e-15);
        assert!((ramsey_forward(PI) + 0.5).abs() < 1e-15);
        assert!(ramsey_forward(PI / 2.0).abs() < 1e-15);
        assert!((ramsey_inverse(0.0).value - PI / 2.0).abs() < 1e-15);
        let back = ramsey_inverse(ramsey_forward(1.234)).value;
        assert!((back - 1.234).abs() < 1e-10);
    }

    #[test]
    fn ramsey_inverse_clamps_and_flags() {
        let hi = ramsey_inverse(0.5 + 1e-6);
        assert!(hi.out_of_range);
        assert_eq!(hi.value, 0.0);
        let edge = ramsey_inverse(0.5 + 1e-10);
        assert!(!edge.out_of_range);
        let lo = ramsey_inverse(-0.7);
        assert!(lo.out_of_range);
        assert!((lo.value - PI).abs() < 1e-15);
    }

    #[test]
    fn sample_outcome_extremes() {
        let mut rng = SeededRng::new(11, 0);
        for _ in 0..1000 {
            assert!(!sample_outcome(0.0, &mut rng));
            assert!(sample_outcome(1.0, &mut rng));
        }
    }
}
