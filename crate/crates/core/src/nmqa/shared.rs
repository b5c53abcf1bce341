//! Per-site counters and running statistics shared by all alpha particles.

use crate::measurement::{sample_outcome, SignalMap};
use crate::rng::SeededRng;

use super::scoring::{data_association_H, map_estimate_h};

/// An observation arriving at one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    /// Physical single-shot outcome at the measured site.
    Measurement { site: usize, outcome: bool },
    /// Synthetic outcome broadcast to a neighbour.
    Message { site: usize, outcome: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharedDataState {
    /// Physical measurements received per site.
    pub tau: Vec<u32>,
    /// Data messages received per site.
    pub phi: Vec<u32>,
    /// `kappa[site][alpha]`: running mean of physical outcomes, or the initial
    /// draw while `tau[site] == 0`.
    pub kappa: Vec<Vec<f64>>,
    /// `gamma[site][alpha]`: running mean of data messages, or the initial draw
    /// while `phi[site] == 0`.
    pub gamma: Vec<Vec<f64>>,
}

impl SharedDataState {
    /// Initial statistics: one Bernoulli draw per site and particle at
    /// probability `1/2 + s(f0)`, shared by `kappa` and `gamma`.
    pub fn initialize<S: SignalMap + ?Sized>(
        initial_f: &[Vec<f64>],
        d: usize,
        signal: &S,
        rng: &mut SeededRng,
    ) -> Self {
        let n_alpha = initial_f.len();
        let mut kappa = vec![vec![0.0; n_alpha]; d];
        for (alpha, f) in initial_f.iter().enumerate() {
            for site in 0..d {
                let y = sample_outcome(0.5 + signal.forward(f[site]), rng);
                kappa[site][alpha] = if y { 1.0 } else { 0.0 };
            }
        }
        Self {
            tau: vec![0; d],
            phi: vec![0; d],
            gamma: kappa.clone(),
            kappa,
        }
    }

    pub fn sites(&self) -> usize {
        self.tau.len()
    }

    pub fn n_alpha(&self) -> usize {
        self.kappa.first().map_or(0, |row| row.len())
    }

    /// Increments the matching counter and folds the outcome into the running
    /// mean with uniform weights `1/count`.
    pub fn update(&mut self, event: Event) {
        let (count, stats, outcome) = match event {
            Event::Measurement { site, outcome } => (&mut self.tau[site], &mut self.kappa[site], outcome),
            Event::Message { site, outcome } => (&mut self.phi[site], &mut self.gamma[site], outcome),
        };
        *count += 1;
        let y = if outcome { 1.0 } else { 0.0 };
        let inv = 1.0 / *count as f64;
        for value in stats.iter_mut() {
            *value += (y - *value) * inv;
        }
    }

    /// Data-association statistic for `site` and particle `alpha`.
    pub fn h_statistic(&self, site: usize, alpha: usize, lambda1: f64) -> f64 {
        data_association_H(
            lambda1,
            self.tau[site],
            self.phi[site],
            self.kappa[site][alpha],
            self.gamma[site][alpha],
        )
    }

    /// Map estimate and out-of-range flag for `site` and particle `alpha`.
    pub fn h_value<S: SignalMap + ?Sized>(
        &self,
        site: usize,
        alpha: usize,
        lambda1: f64,
        signal: &S,
    ) -> (f64, bool) {
        let inv = map_estimate_h(self.h_statistic(site, alpha, lambda1), signal);
        (inv.value, inv.out_of_range)
    }

    /// Site has received a measurement or a message.
    pub fn has_data(&self, site: usize) -> bool {
        self.tau[site] > 0 || self.phi[site] > 0
    }

    /// Rearranges the per-particle columns after resampling: offspring `k`
    /// inherits the statistics of `parents[k]`.
    pub fn inherit(&mut self, parents: &[usize]) {
        for row in self.kappa.iter_mut().chain(self.gamma.iter_mut()) {
            let old = row.clone();
            row.clear();
            row.extend(parents.iter().map(|&p| old[p]));
        }
    }
}
