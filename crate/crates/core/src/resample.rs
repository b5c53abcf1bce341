//! Multinomial branching and a statistical check of the branching conditions.
//!
//! A branching mechanism maps normalized parent weights `G` to offspring counts
//! `xi` with three properties: the offspring total is fixed at `n`, the
//! conditional mean of `xi_i` is `n * G_i`, and the conditional covariance `A`
//! satisfies `q' A q <= n * c` for every `|q_i| < 1`. Multinomial sampling meets
//! all three with `c = 1`; [`validate_branching`] checks them by simulation.

use crate::error::{QfiltError, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResampleOutcome {
    /// Offspring count per parent.
    pub offspring_counts: Vec<usize>,
    /// Parent index of every offspring, ascending.
    pub parent_indices: Vec<usize>,
}

impl ResampleOutcome {
    pub fn total(&self) -> usize {
        self.offspring_counts.iter().sum()
    }

    fn from_parents(parents: Vec<usize>, n_parents: usize) -> Self {
        let mut counts = vec![0; n_parents];
        for &p in &parents {
            counts[p] += 1;
        }
        Self {
            offspring_counts: counts,
            parent_indices: parents,
        }
    }
}

/// One multinomial draw of `n_target` offspring over `weights`.
///
/// Uses inverse-CDF lookup with one sorted batch of uniforms. Weights need not
/// be normalized. An all-zero vector yields [`QfiltError::DegenerateWeights`].
pub fn multinomial_resample(
    weights: &[f64],
    n_target: usize,
    rng: &mut SeededRng,
) -> Result<ResampleOutcome> {
    if n_target == 0 {
        return Err(QfiltError::Config("n_target must be at least 1".into()));
    }
    if weights.iter().any(|w| *w < 0.0 || w.is_nan()) {
        return Err(QfiltError::Config("weights must be non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(QfiltError::DegenerateWeights);
    }

    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w / total;
        cumulative.push(acc);
    }

    let mut uniforms: Vec<f64> = (0..n_target).map(|_| rng.uniform()).collect();
    uniforms.sort_by(f64::total_cmp);

    // last category with positive weight absorbs rounding at the top of the CDF
    let last_positive = weights.iter().rposition(|w| *w > 0.0).unwrap_or(0);
    let mut parents = Vec::with_capacity(n_target);
    let mut k = 0;
    for u in uniforms {
        while k < last_positive && (u >= cumulative[k] || weights[k] == 0.0) {
            k += 1;
        }
        parents.push(k);
    }
    Ok(ResampleOutcome::from_parents(parents, weights.len()))
}

/// Uniform resampling, the fallback used after degenerate weights.
pub fn uniform_resample(n_parents: usize, n_target: usize, rng: &mut SeededRng) -> ResampleOutcome {
    let weights = vec![1.0; n_parents.max(1)];
    multinomial_resample(&weights, n_target.max(1), rng).expect("uniform weights are valid")
}

#[derive(Debug, Clone)]
pub struct BranchingStats {
    pub empirical_mean_counts: Vec<f64>,
    /// `A_ij = E[(xi_i - n G_i)(xi_j - n G_j)]`, centred on the theoretical mean.
    pub empirical_covariance: Vec<Vec<f64>>,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct BranchingReport {
    pub stats: BranchingStats,
    /// Every draw summed to `n_target`.
    pub conserved: bool,
    /// Every `|mean_i - n G_i|` within 4 standard errors.
    pub mean_proportional: bool,
    /// Largest `|mean_i - n G_i| / se_i` (0 when `se_i` is 0 and the mean is exact).
    pub max_mean_z: f64,
    /// Every sampled quadratic form within `n (1 + 5 / sqrt(trials))`.
    pub covariance_bounded: bool,
    /// Largest observed `q' A q / n`.
    pub max_quadratic_ratio: f64,
}

impl BranchingReport {
    pub fn passed(&self) -> bool {
        self.conserved && self.mean_proportional && self.covariance_bounded
    }
}

pub const MIN_BRANCHING_TRIALS: usize = 10_000;
const QUADRATIC_PROBES: usize = 100;

/// Checks the branching conditions for [`multinomial_resample`].
pub fn validate_branching(
    weights: &[f64],
    n_target: usize,
    trials: usize,
    rng: &mut SeededRng,
) -> Result<BranchingReport> {
    validate_branching_with(weights, n_target, trials, rng, multinomial_resample)
}

/// Checks the branching conditions for an arbitrary resampler.
pub fn validate_branching_with<R>(
    weights: &[f64],
    n_target: usize,
    trials: usize,
    rng: &mut SeededRng,
    mut resampler: R,
) -> Result<BranchingReport>
where
    R: FnMut(&[f64], usize, &mut SeededRng) -> Result<ResampleOutcome>,
{
    if trials < MIN_BRANCHING_TRIALS {
        return Err(QfiltError::Config(format!(
            "branching validation needs at least {MIN_BRANCHING_TRIALS} trials"
        )));
    }
    let g = crate::ensemble::normalize(weights)?;
    let m = g.len();
    let n = n_target as f64;
    let expected: Vec<f64> = g.iter().map(|gi| n * gi).collect();

    let mut conserved = true;
    let mut sums = vec![0.0; m];
    let mut cov = vec![vec![0.0; m]; m];
    let mut dev = vec![0.0; m];
    for _ in 0..trials {
        let outcome = resampler(weights, n_target, rng)?;
        if outcome.offspring_counts.len() != m || outcome.total() != n_target {
            conserved = false;
        }
        for i in 0..m {
            let c = outcome.offspring_counts.get(i).copied().unwrap_or(0) as f64;
            sums[i] += c;
            dev[i] = c - expected[i];
        }
        for i in 0..m {
            if dev[i] == 0.0 {
                continue;
            }
            for j in i..m {
                cov[i][j] += dev[i] * dev[j];
            }
        }
    }
    let t = trials as f64;
    for i in 0..m {
        for j in i..m {
            cov[i][j] /= t;
            cov[j][i] = cov[i][j];
        }
    }
    let means: Vec<f64> = sums.iter().map(|s| s / t).collect();

    let mut mean_proportional = true;
    let mut max_mean_z: f64 = 0.0;
    for i in 0..m {
        let se = (n * g[i] * (1.0 - g[i]) / t).sqrt();
        let diff = (means[i] - expected[i]).abs();
        if diff > 4.0 * se + 1e-12 {
            mean_proportional = false;
        }
        let z = if se > 0.0 {
            diff / se
        } else if diff > 1e-12 {
            f64::INFINITY
        } else {
            0.0
        };
        max_mean_z = max_mean_z.max(z);
    }

    let bound = n * (1.0 + 5.0 / t.sqrt());
    let mut covariance_bounded = true;
    let mut max_quadratic_ratio: f64 = 0.0;
    for _ in 0..QUADRATIC_PROBES {
        // entries strictly inside (-1, 1)
        let q: Vec<f64> = (0..m).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        let mut form = 0.0;
        for i in 0..m {
            for j in 0..m {
                form += q[i] * cov[i][j] * q[j];
            }
        }
        if form > bound {
            covariance_bounded = false;
        }
        max_quadratic_ratio = max_quadratic_ratio.max(form / n);
    }

    Ok(BranchingReport {
        stats: BranchingStats {
            empirical_mean_counts: means,
            empirical_covariance: cov,
            trials,
        },
        conserved,
        mean_proportional,
        max_mean_z,
        covariance_bounded,
        max_quadratic_ratio,
    })
}
