//! Beta-particle generation: candidate neighbourhood radii at the measured site.

use rand_distr::{Distribution, Normal};

use crate::rng::SeededRng;

use super::config::BetaStrategy;

/// Candidate radii drawn for one alpha particle.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaLayer {
    pub samples: Vec<f64>,
}

impl BetaLayer {
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

/// Draws `n_beta` radii in `r_bounds`.
///
/// `Uniform` ignores `r_bar` and `c_prev`. `TruncGauss` samples a Gaussian with
/// mean `r_bar` and variance `r_bar * c_prev` restricted to `r_bounds`; it falls
/// back to uniform draws when no Fano factor is stored yet (`c_prev == None`).
pub fn generate_beta(
    strategy: BetaStrategy,
    r_bar: f64,
    c_prev: Option<f64>,
    r_bounds: (f64, f64),
    n_beta: usize,
    rng: &mut SeededRng,
) -> BetaLayer {
    let (lo, hi) = r_bounds;
    let samples = match (strategy, c_prev) {
        (BetaStrategy::TruncGauss, Some(c)) => {
            let mean = r_bar.clamp(lo, hi);
            let variance = (mean * c.max(0.0)).max(0.0);
            (0..n_beta)
                .map(|_| sample_truncated_normal(mean, variance, lo, hi, rng))
                .collect()
        }
        _ => (0..n_beta).map(|_| lo + (hi - lo) * rng.uniform()).collect(),
    };
    BetaLayer { samples }
}

/// Gaussian `N(mean, variance)` conditioned on `[lo, hi]`.
///
/// Rejection sampling when the interval holds a reasonable share of the mass,
/// inverse-CDF by bisection otherwise. Zero variance returns `mean` clamped.
pub fn sample_truncated_normal(mean: f64, variance: f64, lo: f64, hi: f64, rng: &mut SeededRng) -> f64 {
    if !(variance > 0.0) || lo == hi {
        return mean.clamp(lo, hi);
    }
    let sd = variance.sqrt();
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    let mass = std_normal_cdf(b) - std_normal_cdf(a);
    if mass > 0.05 {
        let normal = Normal::new(mean, sd).expect("finite sd");
        loop {
            let x = normal.sample(rng);
            if (lo..=hi).contains(&x) {
                return x;
            }
        }
    }
    // work in the tail closest to the mean so the CDF differences stay resolvable
    let flip = a > 0.0;
    let (a, b) = if flip { (-b, -a) } else { (a, b) };
    let (fa, fb) = (std_normal_cdf(a), std_normal_cdf(b));
    if !(fb > fa) {
        // interval lies beyond double precision in the tail; take the near edge
        return if flip { lo } else { hi };
    }
    let u = fa + (fb - fa) * rng.uniform();
    let (mut left, mut right) = (a, b);
    for _ in 0..200 {
        let mid = 0.5 * (left + right);
        if std_normal_cdf(mid) < u {
            left = mid;
        } else {
            right = mid;
        }
    }
    let z = 0.5 * (left + right);
    let z = if flip { -z } else { z };
    (mean + sd * z).clamp(lo, hi)
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}
