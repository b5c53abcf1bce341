//! Self-checks run by `qfilt validate`.

use std::f64::consts::PI;

use crate::error::Result;
use crate::measurement::{compute_rho0, likelihood};
use crate::resample::{multinomial_resample, validate_branching, validate_branching_with, ResampleOutcome};
use crate::rng::{purpose, SeededRng};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// `rho0` by direct integration of the Gaussian noise density against the
/// tent-shaped overlap of the quantization window, `1 - |g| / 2b` on `|g| < 2b`.
pub fn rho0_by_quadrature(bound_b: f64, sigma_v: f64) -> f64 {
    if sigma_v == 0.0 {
        return 1.0;
    }
    let width = 2.0 * bound_b;
    let var = sigma_v;
    let sd = var.sqrt();
    let density = |g: f64| (-g * g / (2.0 * var)).exp() / (2.0 * PI * var).sqrt() * (1.0 - g / width);
    // the integrand is even; beyond 40 sd it is below 1e-300
    let hi = width.min(40.0 * sd);
    let pieces = 64;
    let h = hi / pieces as f64;
    2.0 * (0..pieces)
        .map(|k| adaptive_simpson(&density, k as f64 * h, (k + 1) as f64 * h, 1e-15, 40))
        .sum::<f64>()
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, lm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, rm, fb, right, 0.5 * tol, depth - 1)
}

/// Random `(b, sigma_v)` with `b` in `[0.1, 2]` and `sigma_v` log-uniform in `[1e-9, 1]`.
pub fn random_noise_settings(count: usize, rng: &mut SeededRng) -> Vec<(f64, f64)> {
    (0..count)
        .map(|_| {
            let b = 0.1 + 1.9 * rng.uniform();
            let sigma_v = 10f64.powf(-9.0 + 9.0 * rng.uniform());
            (b, sigma_v)
        })
        .collect()
}

pub fn check_rho0(seed: u64) -> Result<SuiteReport> {
    let mut rng = SeededRng::derive(seed, &[purpose::VALIDATION, 1]);
    let mut worst = 0.0f64;
    for (b, s) in random_noise_settings(50, &mut rng) {
        worst = worst.max((compute_rho0(b, s)? - rho0_by_quadrature(b, s)).abs());
    }
    Ok(SuiteReport {
        name: "rho0 closed form vs quadrature",
        passed: worst <= 1e-8,
        detail: format!("max |diff| = {worst:.3e} over 50 settings"),
    })
}

pub fn check_likelihood(seed: u64) -> Result<SuiteReport> {
    let mut rng = SeededRng::derive(seed, &[purpose::VALIDATION, 2]);
    let mut mass_err = 0.0f64;
    let mut slope_err = 0.0f64;
    let h = 1e-4;
    for (b, sv) in random_noise_settings(50, &mut rng) {
        let rho0 = compute_rho0(b, sv)?;
        for _ in 0..20 {
            let s = -0.5 + h + (1.0 - 2.0 * h) * rng.uniform();
            mass_err = mass_err.max((likelihood(false, s, rho0) + likelihood(true, s, rho0) - rho0).abs());
            let slope = (likelihood(true, s + h, rho0) - likelihood(true, s - h, rho0)) / (2.0 * h);
            slope_err = slope_err.max((slope - rho0).abs());
        }
    }
    Ok(SuiteReport {
        name: "likelihood mass and Lipschitz slope",
        passed: mass_err <= 1e-15 && slope_err <= 1e-6,
        detail: format!("max mass error {mass_err:.2e}, max slope error {slope_err:.2e}"),
    })
}

/// Keeps the heaviest parent and halves everyone else's share.
pub fn broken_resampler(weights: &[f64], n: usize, rng: &mut SeededRng) -> Result<ResampleOutcome> {
    let top = crate::grid::argmax(weights);
    let skewed: Vec<f64> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| if i == top { 2.0 * w } else { 0.5 * w })
        .collect();
    multinomial_resample(&skewed, n, rng)
}

pub fn check_branching(seed: u64, trials: usize) -> Result<Vec<SuiteReport>> {
    let mut rng = SeededRng::derive(seed, &[purpose::VALIDATION, 3]);
    let weights: Vec<f64> = (0..12).map(|_| 0.05 + rng.uniform()).collect();
    let n = 40;
    let good = validate_branching(&weights, n, trials, &mut rng)?;
    let broken = validate_branching_with(&weights, n, trials, &mut rng, broken_resampler)?;
    Ok(vec![
        SuiteReport {
            name: "multinomial branching conditions",
            passed: good.passed(),
            detail: format!(
                "conserved={} max z={:.2} max q'Aq/n={:.4}",
                good.conserved, good.max_mean_z, good.max_quadratic_ratio
            ),
        },
        SuiteReport {
            name: "broken resampler is rejected",
            passed: !broken.passed(),
            detail: format!("max z={:.1}", broken.max_mean_z),
        },
    ])
}

/// Every suite behind `qfilt validate`.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    let mut out = vec![check_rho0(seed)?, check_likelihood(seed)?];
    out.extend(check_branching(seed, 100_000)?);
    Ok(out)
}
