//! Weighted particle ensembles.

use crate::error::{QfiltError, Result};

/// A weighted empirical distribution at one generation.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEnsemble<S> {
    positions: Vec<S>,
    weights: Vec<f64>,
    generation: usize,
}

impl<S> WeightedEnsemble<S> {
    /// Equal-weight ensemble.
    pub fn uniform(positions: Vec<S>, generation: usize) -> Result<Self> {
        if positions.is_empty() {
            return Err(QfiltError::Config("ensemble needs at least one particle".into()));
        }
        let w = 1.0 / positions.len() as f64;
        let weights = vec![w; positions.len()];
        Ok(Self {
            positions,
            weights,
            generation,
        })
    }

    /// Ensemble with arbitrary non-negative weights, normalized on construction.
    pub fn weighted(positions: Vec<S>, weights: Vec<f64>, generation: usize) -> Result<Self> {
        if positions.is_empty() {
            return Err(QfiltError::Config("ensemble needs at least one particle".into()));
        }
        if positions.len() != weights.len() {
            return Err(QfiltError::LengthMismatch {
                expected: positions.len(),
                actual: weights.len(),
            });
        }
        let weights = normalize(&weights)?;
        Ok(Self {
            positions,
            weights,
            generation,
        })
    }

    pub fn positions(&self) -> &[S] {
        &self.positions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn into_parts(self) -> (Vec<S>, Vec<f64>, usize) {
        (self.positions, self.weights, self.generation)
    }
}

impl WeightedEnsemble<f64> {
    /// Weighted mean and (population) variance of scalar positions.
    pub fn moments(&self) -> (f64, f64) {
        let mean: f64 = self
            .positions
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x * w)
            .sum();
        let var: f64 = self
            .positions
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * (x - mean) * (x - mean))
            .sum();
        (mean, var)
    }
}

/// Normalizes non-negative weights to sum to one.
pub fn normalize(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.iter().any(|w| *w < 0.0 || w.is_nan()) {
        return Err(QfiltError::Config("weights must be non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(QfiltError::DegenerateWeights);
    }
    Ok(weights.iter().map(|w| w / total).collect())
}

/// Normalizes log-weights with the log-sum-exp shift.
///
/// Entries equal to `-inf` get zero weight. Fails when every entry is `-inf`.
pub fn normalize_log(log_weights: &[f64]) -> Result<Vec<f64>> {
    let max = log_weights
        .iter()
        .copied()
        .filter(|x| !x.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(QfiltError::DegenerateWeights);
    }
    let unnormalized: Vec<f64> = log_weights
        .iter()
        .map(|lw| if lw.is_nan() { 0.0 } else { (lw - max).exp() })
        .collect();
    normalize(&unnormalized)
}
