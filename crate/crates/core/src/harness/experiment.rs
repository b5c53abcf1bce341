//! The particle-number scaling study and its CSV / manifest artifacts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde_json::json;

use crate::error::{QfiltError, Result};
use crate::exec::{map_ordered, Execution};
use crate::nmqa::{NmqaConfig, NmqaFilter};
use crate::rng::{purpose, stream_id, SeededRng};
use crate::simworld::{oracle_measure, Geometry, TrueField};

use super::config::ExperimentConfig;
use super::fit::{compute_l, fit_epsilon, mean_sem, ScalingFit};

pub const MAX_ATTEMPTS: u32 = 3;

pub const CSV_HEADER: &str =
    "case,strategy,n_alpha,n_beta,t,mean_L,sem_L,epsilon_t,lambda1,lambda2,sigma_v,sigma_F,seed";

/// Random streams used by one trajectory attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellSeeds {
    pub filter_stream: u64,
    pub truth_stream: u64,
}

impl CellSeeds {
    pub fn derive(n_alpha: usize, repetition: usize, attempt: u32) -> Self {
        let labels = |p: u64| [p, n_alpha as u64, repetition as u64, attempt as u64];
        Self {
            filter_stream: stream_id(&labels(purpose::FILTER)),
            truth_stream: stream_id(&labels(purpose::TRUTH)),
        }
    }
}

/// One completed trajectory.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub n_alpha: usize,
    pub repetition: usize,
    /// Zero-based attempt that succeeded.
    pub attempt: u32,
    pub seed: u64,
    pub streams: CellSeeds,
    /// Posterior-mean map after each step.
    pub posterior_f: Vec<Vec<f64>>,
    /// Map error after each step.
    pub l: Vec<f64>,
    /// Site measured at each step.
    pub locations: Vec<usize>,
    pub degenerate_steps: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct FailedAttempt {
    pub n_alpha: usize,
    pub repetition: usize,
    pub attempt: u32,
    pub reason: String,
}

/// Runs one filter against the simulated world for `t_max` steps.
#[allow(clippy::too_many_arguments)]
pub fn run_trajectory(
    cfg: &NmqaConfig,
    geometry: &Geometry,
    field: &TrueField,
    t_max: usize,
    noise_on: bool,
    seed: u64,
    streams: CellSeeds,
) -> Result<(Vec<Vec<f64>>, Vec<f64>, Vec<usize>, usize)> {
    let mut filter_rng = SeededRng::new(seed, streams.filter_stream);
    let mut truth_rng = SeededRng::new(seed, streams.truth_stream);
    let mut filter = NmqaFilter::new(cfg.clone(), geometry.clone(), &mut filter_rng)?;
    let mut posterior = Vec::with_capacity(t_max);
    let mut errors = Vec::with_capacity(t_max);
    let mut locations = Vec::with_capacity(t_max);
    for _ in 0..t_max {
        let j = filter.next_location();
        let y = oracle_measure(field, j, filter.model(), noise_on, &mut truth_rng);
        filter.step(j, y, &mut filter_rng)?;
        let f = filter.posterior_f_mean();
        let l = compute_l(&f, &field.values)?;
        if !l.is_finite() {
            return Err(QfiltError::InvalidModel(format!("non-finite map error at site {j}")));
        }
        posterior.push(f);
        errors.push(l);
        locations.push(j);
    }
    Ok((posterior, errors, locations, filter.degenerate_steps()))
}

fn run_cell(
    config: &ExperimentConfig,
    geometry: &Geometry,
    field: &TrueField,
    n_alpha: usize,
    repetition: usize,
) -> (Result<RunRecord>, Vec<FailedAttempt>) {
    let cfg = config.cell_config(n_alpha);
    let mut failures = Vec::new();
    for attempt in 0..MAX_ATTEMPTS {
        let streams = CellSeeds::derive(n_alpha, repetition, attempt);
        let start = Instant::now();
        match run_trajectory(&cfg, geometry, field, config.t_max, config.world.noise_on, config.seed, streams) {
            Ok((posterior_f, l, locations, degenerate_steps)) => {
                let record = RunRecord {
                    n_alpha,
                    repetition,
                    attempt,
                    seed: config.seed,
                    streams,
                    posterior_f,
                    l,
                    locations,
                    degenerate_steps,
                    wall_time: start.elapsed(),
                };
                return (Ok(record), failures);
            }
            Err(e) => failures.push(FailedAttempt {
                n_alpha,
                repetition,
                attempt,
                reason: e.to_string(),
            }),
        }
    }
    let reason = failures.last().map(|f| f.reason.clone()).unwrap_or_default();
    let err = QfiltError::TrajectoryFailed {
        attempts: MAX_ATTEMPTS as usize,
        reason,
    };
    (Err(err), failures)
}

#[derive(Debug, Clone)]
pub struct ScalingResult {
    pub config: ExperimentConfig,
    pub n_beta: Vec<usize>,
    /// `mean_l[i][t - 1]` for `n_alpha_grid[i]`.
    pub mean_l: Vec<Vec<f64>>,
    pub sem_l: Vec<Vec<f64>>,
    /// Fit at each `t`; `None` when fewer than three grid points are usable.
    pub fits: Vec<Option<ScalingFit>>,
    /// Grouped by grid entry, then repetition.
    pub records: Vec<RunRecord>,
    pub failures: Vec<FailedAttempt>,
    pub wall_time: Duration,
}

impl ScalingResult {
    /// Slope at each `t` (1-based index `t - 1`), NaN where undefined.
    pub fn epsilon(&self) -> Vec<f64> {
        self.fits
            .iter()
            .map(|f| f.as_ref().map_or(f64::NAN, |f| f.slope))
            .collect()
    }

    /// Median slope over `t` in `[t_lo, t_hi]` (inclusive, 1-based).
    pub fn median_epsilon(&self, t_lo: usize, t_hi: usize) -> Option<f64> {
        let eps = self.epsilon();
        let lo = t_lo.max(1) - 1;
        let hi = t_hi.min(eps.len());
        if lo >= hi {
            return None;
        }
        super::fit::median(&eps[lo..hi])
    }
}

pub fn run_scaling_experiment(config: &ExperimentConfig) -> Result<ScalingResult> {
    run_scaling_experiment_with(config, config.execution)
}

/// Runs every `(n_alpha, repetition)` cell and reduces in grid order.
pub fn run_scaling_experiment_with(config: &ExperimentConfig, mode: Execution) -> Result<ScalingResult> {
    config.validate()?;
    let start = Instant::now();
    let (geometry, field) = config.world.build()?;
    let cells: Vec<(usize, usize)> = config
        .n_alpha_grid
        .iter()
        .flat_map(|&n| (0..config.repetitions).map(move |r| (n, r)))
        .collect();
    let outcomes = map_ordered(mode, cells, |(n, r)| run_cell(config, &geometry, &field, n, r));

    let mut records = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (record, failed) in outcomes {
        failures.extend(failed);
        records.push(record?);
    }

    let t_max = config.t_max;
    let reps = config.repetitions;
    let mut mean_l = Vec::with_capacity(config.n_alpha_grid.len());
    let mut sem_l = Vec::with_capacity(config.n_alpha_grid.len());
    for block in records.chunks(reps) {
        let (means, sems): (Vec<f64>, Vec<f64>) = (0..t_max)
            .map(|t| mean_sem(&block.iter().map(|r| r.l[t]).collect::<Vec<_>>()))
            .unzip();
        mean_l.push(means);
        sem_l.push(sems);
    }
    let fits = (0..t_max)
        .map(|t| {
            let points: Vec<(f64, f64)> = config
                .n_alpha_grid
                .iter()
                .zip(&mean_l)
                .map(|(&n, m)| (n as f64, m[t]))
                .collect();
            fit_epsilon(&points).ok()
        })
        .collect();
    Ok(ScalingResult {
        n_beta: config
            .n_alpha_grid
            .iter()
            .map(|&n| config.cell_config(n).effective_n_beta())
            .collect(),
        config: config.clone(),
        mean_l,
        sem_l,
        fits,
        records,
        failures,
        wall_time: start.elapsed(),
    })
}

/// Rows for every result, grid-major then `t`.
pub fn results_csv(results: &[ScalingResult]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for res in results {
        let cfg = &res.config;
        let eps = res.epsilon();
        for (i, &n_alpha) in cfg.n_alpha_grid.iter().enumerate() {
            for t in 0..cfg.t_max {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    cfg.case,
                    cfg.nmqa.beta_strategy.label(),
                    n_alpha,
                    res.n_beta[i],
                    t + 1,
                    res.mean_l[i][t],
                    res.sem_l[i][t],
                    eps[t],
                    cfg.nmqa.lambda1,
                    cfg.nmqa.lambda2,
                    cfg.nmqa.sigma_v,
                    cfg.nmqa.sigma_f,
                    cfg.seed,
                )
                .expect("writing to a String cannot fail");
            }
        }
    }
    out
}

pub fn manifest_json(results: &[ScalingResult]) -> serde_json::Value {
    let experiments: Vec<_> = results
        .iter()
        .map(|res| {
            let cells: Vec<_> = res
                .records
                .iter()
                .map(|r| {
                    json!({
                        "n_alpha": r.n_alpha,
                        "repetition": r.repetition,
                        "attempt": r.attempt,
                        "seed": r.seed,
                        "filter_stream": r.streams.filter_stream,
                        "truth_stream": r.streams.truth_stream,
                        "degenerate_steps": r.degenerate_steps,
                    })
                })
                .collect();
            let failures: Vec<_> = res
                .failures
                .iter()
                .map(|f| {
                    json!({
                        "n_alpha": f.n_alpha,
                        "repetition": f.repetition,
                        "attempt": f.attempt,
                        "reason": f.reason,
                    })
                })
                .collect();
            json!({
                "config": res.config,
                "cells": cells,
                "failures": failures,
                "wall_time_s": res.wall_time.as_secs_f64(),
            })
        })
        .collect();
    json!({
        "code_version": env!("CARGO_PKG_VERSION"),
        "experiments": experiments,
    })
}

/// Writes `results.csv` and `manifest.json` into `dir`.
pub fn write_artifacts(dir: &Path, results: &[ScalingResult]) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join("results.csv");
    std::fs::write(&csv, results_csv(results))?;
    let manifest = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest_json(results))
        .map_err(|e| QfiltError::Parse(e.to_string()))?;
    std::fs::write(&manifest, text + "\n")?;
    Ok((csv, manifest))
}
