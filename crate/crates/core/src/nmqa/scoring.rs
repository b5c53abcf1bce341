//! Neighbourhoods, smearing, data association and the particle scores.

use crate::measurement::{likelihood, Inverted, SignalMap};
use crate::simworld::Geometry;

/// Sites `q != j` with `distance(j, q) < k0 * r`.
pub fn neighborhood(j: usize, r: f64, geometry: &Geometry, k0: f64) -> Vec<usize> {
    let reach = k0 * r;
    (0..geometry.len())
        .filter(|&q| q != j && geometry.distance(j, q) < reach)
        .collect()
}

/// Gaussian smearing factor `exp(-nu^2 / (2 r^2))`.
///
/// A zero radius gives 1 at zero distance and 0 elsewhere.
pub fn smear(nu: f64, r: f64) -> f64 {
    if r == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    (-(nu * nu) / (2.0 * r * r)).exp()
}

/// Estimate at `q` after sharing the value at `j`:
/// `(1 - lambda2^tau_q) f_q + lambda2^tau_q f_j exp(-nu^2 / (2 r^2))`.
pub fn chi(f_q: f64, f_j: f64, r: f64, nu: f64, lambda2: f64, tau_q: u32) -> f64 {
    let w = lambda_power(lambda2, tau_q);
    (1.0 - w) * f_q + w * f_j * smear(nu, r)
}

/// `base^count` with `0^0 = 1`.
pub fn lambda_power(base: f64, count: u32) -> f64 {
    base.powi(count as i32)
}

/// Mass of `N(mu_f, sigma_f)` on `[-pi, pi]`, the range of a difference of two phases.
pub fn compute_k1(mu_f: f64, sigma_f: f64) -> f64 {
    let width = (2.0 * sigma_f).sqrt();
    let pi = std::f64::consts::PI;
    0.5 * (libm::erf((pi + mu_f) / width) + libm::erf((pi - mu_f) / width))
}

/// Data-association statistic at one site for one particle.
///
/// Blends the running mean of physical measurements `kappa` with the running
/// mean of data messages `gamma`. When nothing has been received `kappa` still
/// holds the particle's initial draw and is returned as is.
#[allow(non_snake_case)]
pub fn data_association_H(lambda1: f64, tau: u32, phi: u32, kappa: f64, gamma: f64) -> f64 {
    match (tau > 0, phi > 0) {
        (true, true) => {
            let w = 0.5 * lambda_power(lambda1, tau);
            (1.0 - w) * kappa + w * gamma
        }
        (true, false) => kappa,
        (false, true) => gamma,
        (false, false) => kappa,
    }
}

/// Map estimate `s^-1(H - 1/2)`.
pub fn map_estimate_h<S: SignalMap + ?Sized>(h_stat: f64, signal: &S) -> Inverted {
    signal.inverse(h_stat - 0.5)
}

/// Score of an alpha particle after outcome `y` at the measured site, given that
/// particle's map estimate `h_j` there.
pub fn score_g1<S: SignalMap + ?Sized>(y: bool, h_j: f64, rho0: f64, signal: &S) -> f64 {
    likelihood(y, signal.forward(h_j), rho0).max(0.0)
}

/// One neighbour's contribution to the beta score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborTerm {
    /// The particle's map estimate at the neighbour.
    pub h_q: f64,
    /// Distance from the measured site.
    pub nu: f64,
    /// Physical measurement count at the neighbour.
    pub tau_q: u32,
}

/// Parameters of the smearing-error model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearingModel {
    pub lambda2: f64,
    pub mu_f: f64,
    pub sigma_f: f64,
    pub k1: f64,
}

impl SmearingModel {
    pub fn new(lambda2: f64, mu_f: f64, sigma_f: f64) -> Self {
        Self {
            lambda2,
            mu_f,
            sigma_f,
            k1: compute_k1(mu_f, sigma_f),
        }
    }
}

/// Log of the beta score: sum over neighbours of
/// `-ln k1 - (h_q - chi - mu_f)^2 / (2 sigma_f)`. Zero for no neighbours.
pub fn log_score_g2(h_j: f64, r_candidate: f64, neighbors: &[NeighborTerm], m: &SmearingModel) -> f64 {
    let ln_k1 = m.k1.ln();
    neighbors
        .iter()
        .map(|n| {
            let c = chi(n.h_q, h_j, r_candidate, n.nu, m.lambda2, n.tau_q);
            let resid = n.h_q - c - m.mu_f;
            -ln_k1 - resid * resid / (2.0 * m.sigma_f)
        })
        .sum()
}

pub fn score_g2(h_j: f64, r_candidate: f64, neighbors: &[NeighborTerm], m: &SmearingModel) -> f64 {
    log_score_g2(h_j, r_candidate, neighbors, m).exp()
}
