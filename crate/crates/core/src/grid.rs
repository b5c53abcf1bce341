//! Exact discrete Bayes recursion on a one-dimensional grid.
//!
//! Used as ground truth for the bootstrap filter on small state spaces.

use crate::error::{QfiltError, Result};

pub const MAX_GRID_CELLS: usize = 10_000;

/// Cell centres of an evenly spaced grid including both endpoints.
pub fn linspace(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    match cells {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (cells - 1) as f64;
            (0..cells).map(|i| lo + step * i as f64).collect()
        }
    }
}

/// Posterior after folding `observations` into `prior` one at a time.
///
/// `likelihood(cell, outcome)` is the probability of `outcome` given the state in
/// `cell`. The posterior is renormalized after each observation.
pub fn grid_bayes_oracle<L>(prior: &[f64], likelihood: L, observations: &[bool]) -> Result<Vec<f64>>
where
    L: Fn(usize, bool) -> f64,
{
    if prior.is_empty() || prior.len() > MAX_GRID_CELLS {
        return Err(QfiltError::Config(format!(
            "grid size must be in 1..={MAX_GRID_CELLS}, got {}",
            prior.len()
        )));
    }
    let mass: f64 = prior.iter().sum();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(QfiltError::Config(format!("prior sums to {mass}, expected 1")));
    }
    let mut post = prior.to_vec();
    for (step, &y) in observations.iter().enumerate() {
        let mut total = 0.0;
        for (cell, p) in post.iter_mut().enumerate() {
            *p *= likelihood(cell, y);
            total += *p;
        }
        if !(total > 0.0) {
            return Err(QfiltError::ImpossibleObservation { step });
        }
        post.iter_mut().for_each(|p| *p /= total);
    }
    Ok(post)
}

/// Mean of `values` under the probability vector `probs`.
pub fn grid_mean(values: &[f64], probs: &[f64]) -> f64 {
    values.iter().zip(probs).map(|(v, p)| v * p).sum()
}

pub fn argmax(probs: &[f64]) -> usize {
    let mut best = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p > probs[best] {
            best = i;
        }
    }
    best
}
