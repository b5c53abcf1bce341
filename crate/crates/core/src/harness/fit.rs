//! Map error and log-log scaling fits.

use crate::error::{QfiltError, Result};

/// Per-site mean squared error `||estimate - truth||^2 / d`.
pub fn compute_l(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(QfiltError::LengthMismatch {
            expected: truth.len(),
            actual: estimate.len(),
        });
    }
    if truth.is_empty() {
        return Err(QfiltError::Config("empty map".into()));
    }
    let sq: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sq / truth.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residuals of the points that entered the fit, in input order.
    pub residuals: Vec<f64>,
    /// Particle counts dropped because their mean error was not positive.
    pub excluded: Vec<f64>,
}

/// Least-squares slope of `ln L` on `ln n`.
///
/// Points with `L <= 0` (or non-finite) cannot be logged and are dropped; fewer
/// than three remaining points is an error.
pub fn fit_epsilon(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    let mut excluded = Vec::new();
    for &(n, l) in points {
        if l > 0.0 && l.is_finite() && n > 0.0 {
            xs.push(n.ln());
            ys.push(l.ln());
        } else {
            excluded.push(n);
        }
    }
    if xs.len() < 3 {
        return Err(QfiltError::UndefinedFit { usable: xs.len() });
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(QfiltError::UndefinedFit { usable: 1 });
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    Ok(ScalingFit {
        slope,
        intercept,
        residuals,
        excluded,
    })
}

/// Median of the finite entries; `None` if there are none.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Mean and standard error of the mean.
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn error_examples() {
        assert_eq!(compute_l(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let l = compute_l(&[0.0, 0.0], &[PI / 2.0, PI / 2.0]).unwrap();
        assert!((l - PI * PI / 4.0).abs() < 1e-15);
        assert!(compute_l(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn exact_power_laws() {
        let ns = [3.0, 9.0, 15.0, 21.0, 30.0];
        let inv: Vec<_> = ns.iter().map(|&n| (n, 2.0 / n)).collect();
        assert!((fit_epsilon(&inv).unwrap().slope + 1.0).abs() < 1e-12);
        let flat: Vec<_> = ns.iter().map(|&n| (n, 0.3)).collect();
        assert!(fit_epsilon(&flat).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn drops_non_positive_points() {
        let pts = [(3.0, 1.0), (9.0, 0.0), (15.0, 0.2), (21.0, 0.1)];
        let fit = fit_epsilon(&pts).unwrap();
        assert_eq!(fit.excluded, vec![9.0]);
        assert_eq!(fit.residuals.len(), 3);
        let few = [(3.0, 1.0), (9.0, -1.0), (15.0, 0.2)];
        assert!(matches!(fit_epsilon(&few), Err(QfiltError::UndefinedFit { usable: 2 })));
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[f64::NAN]), None);
    }
}
