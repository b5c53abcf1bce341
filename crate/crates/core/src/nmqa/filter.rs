use crate::ensemble::normalize_log;
use crate::error::{QfiltError, Result};
use crate::measurement::{sample_outcome, MeasurementModel, Ramsey, SignalMap};
use crate::resample::{multinomial_resample, uniform_resample, ResampleOutcome};
use crate::rng::SeededRng;
use crate::simworld::Geometry;

use super::beta::generate_beta;
use super::config::NmqaConfig;
use super::control::{fano_and_control, ControlRecord};
use super::scoring::{chi, log_score_g2, neighborhood, score_g1, NeighborTerm, SmearingModel};
use super::shared::{Event, SharedDataState};

/// One full map hypothesis: phase and neighbourhood radius per site.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaParticle {
    pub f: Vec<f64>,
    pub r: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataMessage {
    pub site: usize,
    pub outcome: bool,
    /// Shared phase estimate the message was drawn from.
    pub chi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageOutcome {
    /// Stage-one offspring per (alpha, beta) pair, alpha-major.
    pub pair_counts: Vec<usize>,
    /// Surviving beta indices per alpha, with multiplicity.
    pub survivors: Vec<Vec<usize>>,
    /// Share of stage-one offspring held by each alpha.
    pub omega: Vec<f64>,
    /// Stage-two parent of each new alpha particle.
    pub alpha_parents: Vec<usize>,
    pub first_stage_total: usize,
    pub second_stage_total: usize,
    /// Stage one fell back to uniform weights.
    pub degenerate: bool,
}

/// Resamples `n_alpha * n_beta` pairs, groups the survivors by alpha parent, then
/// resamples `n_alpha` alpha particles with the grouped shares as weights.
///
/// `pair_weights` is alpha-major and need not be normalized.
pub fn two_stage_resample(
    pair_weights: &[f64],
    n_alpha: usize,
    n_beta: usize,
    rng: &mut SeededRng,
) -> Result<TwoStageOutcome> {
    let n_pairs = n_alpha * n_beta;
    if pair_weights.len() != n_pairs {
        return Err(QfiltError::LengthMismatch {
            expected: n_pairs,
            actual: pair_weights.len(),
        });
    }
    let (first, degenerate) = match multinomial_resample(pair_weights, n_pairs, rng) {
        Ok(out) => (out, false),
        Err(QfiltError::DegenerateWeights) => (uniform_resample(n_pairs, n_pairs, rng), true),
        Err(e) => return Err(e),
    };
    Ok(group_and_resample(first, n_alpha, n_beta, degenerate, rng))
}

fn group_and_resample(
    first: ResampleOutcome,
    n_alpha: usize,
    n_beta: usize,
    degenerate: bool,
    rng: &mut SeededRng,
) -> TwoStageOutcome {
    let first_stage_total = first.total();
    let mut survivors = vec![Vec::new(); n_alpha];
    for &pair in &first.parent_indices {
        survivors[pair / n_beta].push(pair % n_beta);
    }
    let omega: Vec<f64> = survivors
        .iter()
        .map(|s| s.len() as f64 / first_stage_total as f64)
        .collect();
    let second = multinomial_resample(&omega, n_alpha, rng)
        .expect("stage-one survivors give a valid weight vector");
    TwoStageOutcome {
        pair_counts: first.offspring_counts,
        survivors,
        omega,
        second_stage_total: second.total(),
        alpha_parents: second.parent_indices,
        first_stage_total,
        degenerate,
    }
}

/// Synthetic outcomes for the neighbours of `j`, drawn from the posterior-mean
/// map: `Bernoulli(s(chi) + 1/2)`.
#[allow(clippy::too_many_arguments)]
pub fn emit_data_messages<S: SignalMap + ?Sized>(
    f_mean: &[f64],
    r_j: f64,
    j: usize,
    neighbors: &[usize],
    tau: &[u32],
    lambda2: f64,
    geometry: &Geometry,
    signal: &S,
    rng: &mut SeededRng,
) -> Vec<DataMessage> {
    neighbors
        .iter()
        .map(|&q| {
            let estimate = chi(f_mean[q], f_mean[j], r_j, geometry.distance(j, q), lambda2, tau[q]);
            let outcome = sample_outcome(signal.forward(estimate) + 0.5, rng);
            DataMessage {
                site: q,
                outcome,
                chi: estimate,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub t: usize,
    pub location: usize,
    pub outcome: bool,
    /// Neighbourhood used for scoring (from the radius before this step).
    pub scoring_neighborhood: Vec<usize>,
    pub resampling: TwoStageOutcome,
    pub control: ControlRecord,
    pub messages: Vec<DataMessage>,
}

/// Adaptive two-layer particle filter over a `d`-site phase map.
#[derive(Debug, Clone)]
pub struct NmqaFilter<S = Ramsey> {
    config: NmqaConfig,
    model: MeasurementModel,
    signal: S,
    geometry: Geometry,
    smearing: SmearingModel,
    f_bounds: (f64, f64),
    r_bounds: (f64, f64),
    n_beta: usize,
    alphas: Vec<AlphaParticle>,
    shared: SharedDataState,
    fano: Vec<Option<f64>>,
    t: usize,
    next_location: usize,
    degenerate_steps: usize,
    out_of_range_inversions: usize,
}

/// Radius interval from the array: `[min separation, multiple * max separation]`.
pub fn default_r_bounds(geometry: &Geometry, multiple: f64) -> (f64, f64) {
    let lo = match geometry.min_separation() {
        s if s > 0.0 => s,
        _ => geometry.spacing,
    };
    let hi = (multiple * geometry.max_separation()).max(lo);
    (lo, hi)
}

impl NmqaFilter<Ramsey> {
    pub fn new(config: NmqaConfig, geometry: Geometry, rng: &mut SeededRng) -> Result<Self> {
        Self::with_signal(config, geometry, Ramsey, rng)
    }
}

impl<S: SignalMap> NmqaFilter<S> {
    /// Alpha particles i.i.d. uniform over the phase and radius intervals.
    pub fn with_signal(config: NmqaConfig, geometry: Geometry, signal: S, rng: &mut SeededRng) -> Result<Self> {
        config.validate()?;
        if geometry.is_empty() {
            return Err(QfiltError::Config("geometry has no sites".into()));
        }
        let model = MeasurementModel::new(config.bound_b, config.sigma_v)?;
        let d = geometry.len();
        let f_bounds = signal.domain();
        let r_bounds = match config.r_bounds {
            Some([lo, hi]) => (lo, hi),
            None => default_r_bounds(&geometry, config.r_max_multiple),
        };
        let uniform = |(lo, hi): (f64, f64), rng: &mut SeededRng| lo + (hi - lo) * rng.uniform();
        let alphas: Vec<AlphaParticle> = (0..config.n_alpha)
            .map(|_| AlphaParticle {
                f: (0..d).map(|_| uniform(f_bounds, rng)).collect(),
                r: (0..d).map(|_| uniform(r_bounds, rng)).collect(),
            })
            .collect();
        let initial_f: Vec<Vec<f64>> = alphas.iter().map(|a| a.f.clone()).collect();
        let shared = SharedDataState::initialize(&initial_f, d, &signal, rng);
        Ok(Self {
            smearing: SmearingModel::new(config.lambda2, config.mu_f, config.sigma_f),
            n_beta: config.effective_n_beta(),
            config,
            model,
            signal,
            geometry,
            f_bounds,
            r_bounds,
            alphas,
            shared,
            fano: vec![None; d],
            t: 0,
            next_location: 0,
            degenerate_steps: 0,
            out_of_range_inversions: 0,
        })
    }

    pub fn config(&self) -> &NmqaConfig {
        &self.config
    }

    pub fn model(&self) -> &MeasurementModel {
        &self.model
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn alphas(&self) -> &[AlphaParticle] {
        &self.alphas
    }

    pub fn shared(&self) -> &SharedDataState {
        &self.shared
    }

    pub fn fano(&self) -> &[Option<f64>] {
        &self.fano
    }

    pub fn r_bounds(&self) -> (f64, f64) {
        self.r_bounds
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Site the controller picked for the next measurement.
    pub fn next_location(&self) -> usize {
        self.next_location
    }

    pub fn degenerate_steps(&self) -> usize {
        self.degenerate_steps
    }

    pub fn out_of_range_inversions(&self) -> usize {
        self.out_of_range_inversions
    }

    /// Mean phase map over alpha particles.
    pub fn posterior_f_mean(&self) -> Vec<f64> {
        mean_columns(self.alphas.iter().map(|a| a.f.as_slice()), self.geometry.len())
    }

    /// Mean radius map over alpha particles.
    pub fn posterior_r_mean(&self) -> Vec<f64> {
        mean_columns(self.alphas.iter().map(|a| a.r.as_slice()), self.geometry.len())
    }

    fn posterior_r_at(&self, site: usize) -> f64 {
        self.alphas.iter().map(|a| a.r[site]).sum::<f64>() / self.alphas.len() as f64
    }

    /// Overwrites every particle's phase at `site` with its data-association estimate.
    fn refresh_map(&mut self, site: usize) {
        let (lo, hi) = self.f_bounds;
        for (alpha, particle) in self.alphas.iter_mut().enumerate() {
            let (value, flagged) = self
                .shared
                .h_value(site, alpha, self.config.lambda1, &self.signal);
            if flagged {
                self.out_of_range_inversions += 1;
            }
            particle.f[site] = value.clamp(lo, hi);
        }
    }

    fn h_value(&self, site: usize, alpha: usize) -> f64 {
        let (lo, hi) = self.f_bounds;
        self.shared
            .h_value(site, alpha, self.config.lambda1, &self.signal)
            .0
            .clamp(lo, hi)
    }

    /// Folds in outcome `y` measured at site `j` and runs one full iteration.
    pub fn step(&mut self, j: usize, y: bool, rng: &mut SeededRng) -> Result<StepReport> {
        let d = self.geometry.len();
        if j >= d {
            return Err(QfiltError::Config(format!("site {j} out of range for {d} sites")));
        }
        let n_alpha = self.alphas.len();
        let n_beta = self.n_beta;

        // static kernel: particles carry over unchanged
        self.shared.update(Event::Measurement { site: j, outcome: y });
        self.refresh_map(j);

        let scoring_neighborhood =
            neighborhood(j, self.posterior_r_at(j), &self.geometry, self.config.k0);

        let mut layers = Vec::with_capacity(n_alpha);
        let mut log_weights = Vec::with_capacity(n_alpha * n_beta);
        let rho0 = self.model.rho0();
        for alpha in 0..n_alpha {
            let h_j = self.h_value(j, alpha);
            let log_g1 = score_g1(y, h_j, rho0, &self.signal).ln();
            let terms: Vec<NeighborTerm> = scoring_neighborhood
                .iter()
                .map(|&q| NeighborTerm {
                    h_q: self.h_value(q, alpha),
                    nu: self.geometry.distance(j, q),
                    tau_q: self.shared.tau[q],
                })
                .collect();
            let layer = generate_beta(
                self.config.beta_strategy,
                self.alphas[alpha].r[j],
                self.fano[j],
                self.r_bounds,
                n_beta,
                rng,
            );
            for &r in &layer.samples {
                log_weights.push(log_g1 + log_score_g2(h_j, r, &terms, &self.smearing));
            }
            layers.push(layer);
        }

        let resampling = match normalize_log(&log_weights) {
            Ok(w) => two_stage_resample(&w, n_alpha, n_beta, rng)?,
            Err(QfiltError::DegenerateWeights) => {
                two_stage_resample(&vec![0.0; n_alpha * n_beta], n_alpha, n_beta, rng)?
            }
            Err(e) => return Err(e),
        };
        if resampling.degenerate {
            self.degenerate_steps += 1;
        }

        // surviving radii per alpha; their mean becomes the particle's radius at j
        let surviving: Vec<Vec<f64>> = resampling
            .survivors
            .iter()
            .zip(&layers)
            .map(|(idx, layer)| idx.iter().map(|&b| layer.samples[b]).collect())
            .collect();
        let new_r: Vec<Option<f64>> = surviving
            .iter()
            .map(|s| (!s.is_empty()).then(|| s.iter().sum::<f64>() / s.len() as f64))
            .collect();

        let (r_lo, r_hi) = self.r_bounds;
        let next_alphas: Vec<AlphaParticle> = resampling
            .alpha_parents
            .iter()
            .map(|&p| {
                let mut child = self.alphas[p].clone();
                if let Some(r) = new_r[p] {
                    child.r[j] = r.clamp(r_lo, r_hi);
                }
                child
            })
            .collect();
        self.alphas = next_alphas;
        self.shared.inherit(&resampling.alpha_parents);

        let control = fano_and_control(&surviving, j, &mut self.fano, &self.shared.tau);
        self.next_location = control.next_location;

        let r_post = self.posterior_r_at(j);
        let message_neighborhood = neighborhood(j, r_post, &self.geometry, self.config.k0);
        let messages = emit_data_messages(
            &self.posterior_f_mean(),
            r_post,
            j,
            &message_neighborhood,
            &self.shared.tau,
            self.config.lambda2,
            &self.geometry,
            &self.signal,
            rng,
        );
        for m in &messages {
            self.shared.update(Event::Message {
                site: m.site,
                outcome: m.outcome,
            });
            self.refresh_map(m.site);
        }

        self.t += 1;
        Ok(StepReport {
            t: self.t,
            location: j,
            outcome: y,
            scoring_neighborhood,
            resampling,
            control,
            messages,
        })
    }
}

fn mean_columns<'a>(rows: impl Iterator<Item = &'a [f64]>, d: usize) -> Vec<f64> {
    let mut sum = vec![0.0; d];
    let mut count = 0usize;
    for row in rows {
        for (s, v) in sum.iter_mut().zip(row) {
            *s += v;
        }
        count += 1;
    }
    sum.iter().map(|s| s / count.max(1) as f64).collect()
}
