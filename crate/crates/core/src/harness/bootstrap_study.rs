//! Particle-number scaling of the bootstrap filter against an exact grid posterior.

use std::f64::consts::PI;

use crate::bootstrap::BootstrapFilter;
use crate::error::Result;
use crate::exec::{map_ordered, Execution};
use crate::grid::{grid_bayes_oracle, grid_mean, linspace};
use crate::measurement::{ramsey_born_probability, ramsey_forward, sample_outcome, MeasurementModel};
use crate::rng::{purpose, SeededRng};

use super::fit::{fit_epsilon, mean_sem, ScalingFit};

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapStudyConfig {
    pub n_grid: Vec<usize>,
    pub repetitions: usize,
    /// Measurements per run.
    pub t: usize,
    pub true_phase: f64,
    pub sigma_v: f64,
    pub grid_cells: usize,
    pub seed: u64,
}

impl Default for BootstrapStudyConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![10, 30, 100, 300, 1000],
            repetitions: 200,
            t: 200,
            true_phase: 1.0,
            sigma_v: 1e-3,
            grid_cells: 2001,
            seed: 20_190_417,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BootstrapStudyResult {
    /// Mean over repetitions of `(particle mean - grid posterior mean)^2`, per `n`.
    pub mse: Vec<f64>,
    pub sem: Vec<f64>,
    pub fit: ScalingFit,
    pub degenerate_steps: usize,
}

/// Static phase estimation on `[0, pi]` from a uniform prior.
///
/// Each repetition draws one outcome record, shared by every particle count, and
/// compares each filter's posterior mean to the grid posterior mean.
pub fn run_bootstrap_study(cfg: &BootstrapStudyConfig, mode: Execution) -> Result<BootstrapStudyResult> {
    let model = MeasurementModel::new(0.5, cfg.sigma_v)?;
    let grid = linspace(0.0, PI, cfg.grid_cells);
    let prior = vec![1.0 / cfg.grid_cells as f64; cfg.grid_cells];
    let s_grid: Vec<f64> = grid.iter().map(|&f| ramsey_forward(f)).collect();

    let per_rep = map_ordered(mode, (0..cfg.repetitions).collect(), |rep| -> Result<(Vec<f64>, usize)> {
        let mut truth = SeededRng::derive(cfg.seed, &[purpose::BOOTSTRAP, rep as u64]);
        let p1 = ramsey_born_probability(cfg.true_phase);
        let outcomes: Vec<bool> = (0..cfg.t).map(|_| sample_outcome(p1, &mut truth)).collect();
        let post = grid_bayes_oracle(&prior, |k, y| model.likelihood(y, s_grid[k]), &outcomes)?;
        let exact = grid_mean(&grid, &post);
        let mut errors = Vec::with_capacity(cfg.n_grid.len());
        let mut degenerate = 0;
        for &n in &cfg.n_grid {
            let mut rng = SeededRng::derive(cfg.seed, &[purpose::FILTER, n as u64, rep as u64]);
            let mut filter = BootstrapFilter::init((0.0, PI), n, model, &mut rng)?;
            filter.run(&outcomes, &mut rng)?;
            degenerate += filter.degenerate_steps();
            let (mean, _) = filter.empirical_moments();
            errors.push((mean - exact) * (mean - exact));
        }
        Ok((errors, degenerate))
    });

    let mut columns = vec![Vec::with_capacity(cfg.repetitions); cfg.n_grid.len()];
    let mut degenerate_steps = 0;
    for rep in per_rep {
        let (errors, degenerate) = rep?;
        degenerate_steps += degenerate;
        for (col, e) in columns.iter_mut().zip(errors) {
            col.push(e);
        }
    }
    let (mse, sem): (Vec<f64>, Vec<f64>) = columns.iter().map(|c| mean_sem(c)).unzip();
    let points: Vec<(f64, f64)> = cfg.n_grid.iter().zip(&mse).map(|(&n, &m)| (n as f64, m)).collect();
    Ok(BootstrapStudyResult {
        fit: fit_epsilon(&points)?,
        mse,
        sem,
        degenerate_steps,
    })
}
