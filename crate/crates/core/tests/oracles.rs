//! Reference values from independent computations: quadrature, Monte Carlo,
//! brute-force enumeration and exact grid posteriors.

use std::f64::consts::PI;

use qfilt::bootstrap::BootstrapFilter;
use qfilt::grid::{grid_bayes_oracle, grid_mean, linspace};
use qfilt::harness::{compute_l, fit_epsilon};
use qfilt::measurement::{compute_rho0, ramsey_born_probability, ramsey_forward, sample_outcome, MeasurementModel};
use qfilt::nmqa::{compute_k1, neighborhood, sample_truncated_normal, two_stage_resample};
use qfilt::resample::multinomial_resample;
use qfilt::simworld::{make_field, make_geometry, oracle_measure, FieldKind, GeometryKind, TrueField};
use qfilt::SeededRng;

/// Composite 16-point Gauss-Legendre rule on `[a, b]` with `panels` panels.
fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 8] = [
        0.0950125098376374,
        0.2816035507792589,
        0.4580167776572274,
        0.6178762444026438,
        0.7554044083550030,
        0.8656312023878318,
        0.9445750230732326,
        0.9894009349916499,
    ];
    const W: [f64; 8] = [
        0.1894506104550685,
        0.1826034150449236,
        0.1691565193950025,
        0.1495959888165767,
        0.1246289712555339,
        0.0951585116824928,
        0.0622535239386479,
        0.0271524594117541,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            let half = 0.5 * h;
            X.iter()
                .zip(&W)
                .map(|(x, w)| w * (f(mid - half * x) + f(mid + half * x)))
                .sum::<f64>()
                * half
        })
        .sum()
}

fn gaussian_density(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Noise convolved with the quantization window, integrated as a Gaussian
/// weighted by the window self-overlap `1 - |g| / 2b` on `|g| < 2b`.
fn rho0_oracle(b: f64, sigma_v: f64) -> f64 {
    let width = 2.0 * b;
    let reach = width.min(40.0 * sigma_v.sqrt());
    2.0 * gauss_legendre(|g| gaussian_density(g, 0.0, sigma_v) * (1.0 - g / width), 0.0, reach, 400)
}

#[test]
fn rho0_matches_quadrature_at_reference_point() {
    let q = rho0_oracle(0.5, 0.01);
    let closed = compute_rho0(0.5, 0.01).unwrap();
    assert!((closed - q).abs() < 1e-8, "{closed} vs {q}");
    // frozen from a 30-digit quadrature of the same integral
    assert!((q - 0.920_211_543_919_713_5).abs() < 1e-8, "{q}");
}

#[test]
fn rho0_limits() {
    assert!(compute_rho0(0.5, 1e-14).unwrap() > 1.0 - 1e-6);
    assert!(compute_rho0(0.5, 1e8).unwrap() < 1e-4);
    assert_eq!(compute_rho0(0.5, 0.0).unwrap(), 1.0);
}

#[test]
fn k1_matches_quadrature() {
    let (mu, sigma) = (0.5, 1.0);
    let q = gauss_legendre(|x| gaussian_density(x, mu, sigma), -PI, PI, 200);
    assert!((compute_k1(mu, sigma) - q).abs() < 1e-12);
    assert!((compute_k1(0.0, 1e-12) - 1.0).abs() < 1e-15);
    assert!((compute_k1(0.0, 2.0) - libm::erf(PI / 2.0)).abs() < 1e-15);
}

#[test]
fn truncated_normal_matches_rejection_oracle() {
    let (mean, var, lo, hi): (f64, f64, f64, f64) = (2.0, 2.0 * 0.5, 0.1, 10.0);
    let n = 100_000;
    let mut rng = SeededRng::new(41, 0);
    let mut oracle = Vec::with_capacity(n);
    while oracle.len() < n {
        // Box-Muller, independent of the sampler under test
        let (u1, u2) = (rng.uniform().max(1e-300), rng.uniform());
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
        let x = mean + var.sqrt() * z;
        if (lo..=hi).contains(&x) {
            oracle.push(x);
        }
    }
    let mut rng = SeededRng::new(42, 0);
    let drawn: Vec<f64> = (0..n).map(|_| sample_truncated_normal(mean, var, lo, hi, &mut rng)).collect();
    let stats = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let s2 = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64;
        (m, s2)
    };
    let (m_o, v_o) = stats(&oracle);
    let (m_d, v_d) = stats(&drawn);
    let se_mean = (v_o / n as f64).sqrt() * 2f64.sqrt();
    assert!((m_o - m_d).abs() < 4.0 * se_mean, "{m_o} vs {m_d}");
    // variance of a sample variance is about 2 sigma^4 / n for near-Gaussian data
    let se_var = (2.0 * v_o * v_o / n as f64).sqrt() * 2f64.sqrt();
    assert!((v_o - v_d).abs() < 4.0 * se_var, "{v_o} vs {v_d}");
    assert!(drawn.iter().all(|x| (lo..=hi).contains(x)));
}

#[test]
fn grouped_resampling_shares_match_monte_carlo() {
    // pairs alpha-major: (0.4, 0.1 | 0.3, 0.2)
    let weights = [0.4, 0.1, 0.3, 0.2];
    let trials = 100_000;
    let mut rng = SeededRng::new(7, 0);
    let mut omega_sum = [0.0; 2];
    let mut parent_sum = [0.0; 2];
    for _ in 0..trials {
        let out = two_stage_resample(&weights, 2, 2, &mut rng).unwrap();
        assert_eq!(out.first_stage_total, 4);
        assert_eq!(out.second_stage_total, 2);
        // grouping identity: an alpha's share is the sum of its pairs' offspring
        for a in 0..2 {
            let grouped: usize = out.pair_counts[2 * a..2 * a + 2].iter().sum();
            assert_eq!(grouped, out.survivors[a].len());
            omega_sum[a] += out.omega[a];
        }
        for &p in &out.alpha_parents {
            parent_sum[p] += 1.0;
        }
    }
    for a in 0..2 {
        let mean = omega_sum[a] / trials as f64;
        // Omega_a = Binomial(4, 0.5) / 4, sd 0.25 per trial
        assert!((mean - 0.5).abs() < 4.0 * 0.25 / (trials as f64).sqrt(), "{mean}");
        let share = parent_sum[a] / (2.0 * trials as f64);
        assert!((share - 0.5).abs() < 0.01, "{share}");
    }
}

#[test]
fn multinomial_offspring_means_match_binomial_marginals() {
    let weights = [0.1, 0.2, 0.3, 0.4];
    let n = 10;
    let trials = 100_000;
    let mut rng = SeededRng::new(8, 0);
    let mut sums = [0.0; 4];
    let mut sq = [0.0; 4];
    for _ in 0..trials {
        let out = multinomial_resample(&weights, n, &mut rng).unwrap();
        for i in 0..4 {
            let c = out.offspring_counts[i] as f64;
            sums[i] += c;
            sq[i] += c * c;
        }
    }
    for i in 0..4 {
        let mean = sums[i] / trials as f64;
        let var = sq[i] / trials as f64 - mean * mean;
        let p = weights[i];
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((mean - n as f64 * p).abs() < 4.0 * sd / (trials as f64).sqrt());
        assert!((var - sd * sd).abs() < 0.05 * sd * sd + 0.02, "{var} vs {}", sd * sd);
    }
}

#[test]
fn born_frequencies_at_quarter_turn() {
    let geometry = make_geometry(GeometryKind::Chain1d, 1, 1.0).unwrap();
    let field = TrueField {
        kind: FieldKind::Linear1d,
        values: vec![0.25 * PI],
    };
    let model = MeasurementModel::new(0.5, 1e-6).unwrap();
    let n = 100_000;
    let mut rng = SeededRng::new(3, 0);
    let ones = (0..n)
        .filter(|_| oracle_measure(&field, 0, &model, false, &mut rng))
        .count() as f64;
    let p = 0.5 * (0.25 * PI).cos() + 0.5;
    assert!((p - 0.853_553_390_593_273_7).abs() < 1e-15);
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!((ones / n as f64 - p).abs() < 4.0 * se);
    assert_eq!(geometry.len(), 1);
}

#[test]
fn chain_neighbourhood_by_enumeration() {
    let geometry = make_geometry(GeometryKind::Chain1d, 7, 1.0).unwrap();
    let expected: Vec<usize> = (0..7usize)
        .filter(|&q| q != 3 && ((q as f64) - 3.0).abs() < 1.5)
        .collect();
    assert_eq!(expected, vec![2, 4]);
    assert_eq!(neighborhood(3, 1.5, &geometry, 1.0), expected);
    assert!(neighborhood(3, 0.5, &geometry, 1.0).is_empty());
    assert_eq!(neighborhood(3, 10.0, &geometry, 1.0).len(), 6);
}

#[test]
fn gaussian_field_matches_formula() {
    let geometry = make_geometry(GeometryKind::Grid2d, 25, 1.0).unwrap();
    let field = make_field(FieldKind::Gaussian2d, &geometry).unwrap();
    let sigma = 1.0; // half-width 2 over 2
    for (k, v) in field.values.iter().enumerate() {
        let (x, y) = ((k % 5) as f64, (k / 5) as f64);
        let r2 = (x - 2.0).powi(2) + (y - 2.0).powi(2);
        let direct = 0.25 * PI + 0.5 * PI * (-r2 / (2.0 * sigma * sigma)).exp();
        assert!((v - direct).abs() < 1e-12);
    }
    assert!((field.values[12] - 0.75 * PI).abs() < 1e-15);
}

#[test]
fn map_error_matches_elementwise_sum() {
    let mut rng = SeededRng::new(5, 0);
    let est: Vec<f64> = (0..25).map(|_| PI * rng.uniform()).collect();
    let truth: Vec<f64> = (0..25).map(|_| PI * rng.uniform()).collect();
    let mut acc = 0.0;
    for i in 0..25 {
        let diff = est[i] - truth[i];
        acc += diff * diff;
    }
    assert!((compute_l(&est, &truth).unwrap() - acc / 25.0).abs() < 1e-12);
}

#[test]
fn fit_recovers_synthetic_power_law() {
    let ns = [3.0, 9.0, 15.0, 21.0, 30.0];
    let mut rng = SeededRng::new(6, 0);
    for _ in 0..100 {
        let points: Vec<(f64, f64)> = ns
            .iter()
            .map(|&n: &f64| {
                let noise = 0.1 * (2.0 * rng.uniform() - 1.0);
                (n, 0.8 * n.powf(-0.7) * (1.0 + noise))
            })
            .collect();
        let slope = fit_epsilon(&points).unwrap().slope;
        assert!((slope + 0.7).abs() <= 0.1, "{slope}");
    }
}

#[test]
fn bootstrap_posterior_mean_tracks_grid_posterior() {
    let model = MeasurementModel::new(0.5, 1e-4).unwrap();
    let grid = linspace(0.0, PI, 2001);
    let prior = vec![1.0 / 2001.0; 2001];
    let mut truth = SeededRng::new(12, 0);
    let p1 = ramsey_born_probability(1.1);
    let outcomes: Vec<bool> = (0..60).map(|_| sample_outcome(p1, &mut truth)).collect();
    let post = grid_bayes_oracle(&prior, |k, y| model.likelihood(y, ramsey_forward(grid[k])), &outcomes).unwrap();
    let exact = grid_mean(&grid, &post);
    let mut errs = Vec::new();
    for rep in 0..20 {
        let mut rng = SeededRng::new(100 + rep, 0);
        let mut filter = BootstrapFilter::init((0.0, PI), 3000, model, &mut rng).unwrap();
        filter.run(&outcomes, &mut rng).unwrap();
        errs.push(filter.empirical_moments().0 - exact);
    }
    let mse = errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64;
    assert!(mse.sqrt() < 0.05, "rms {}", mse.sqrt());
}
