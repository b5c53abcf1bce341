//! Adaptive two-layer particle filter for mapping a spatial dephasing field.
//!
//! Alpha particles each carry a full map hypothesis: a phase and a
//! neighbourhood radius per site. After a single-shot measurement at site `j`,
//! every alpha particle spawns beta particles, candidate radii at `j`. Pairs are
//! scored by the product of a measurement term (`g1`, the quantized Born
//! likelihood evaluated at the particle's data-association estimate) and a
//! smearing term (`g2`, how well the estimate at `j` spread over the
//! neighbourhood agrees with the estimates already held there).
//!
//! Resampling happens twice: first over all pairs, then over alpha particles
//! weighted by the share of pair offspring each one kept. The spread of the
//! surviving beta radii (a Fano factor) drives the choice of the next site, and
//! the posterior map is broadcast to neighbours as synthetic data messages.
//!
//! Weights are combined in log space: with small smearing variances the `g2`
//! products underflow long before their ratios stop mattering.

mod beta;
mod config;
mod control;
mod filter;
mod scoring;
mod shared;

pub use beta::{generate_beta, sample_truncated_normal, BetaLayer};
pub use config::{default_n_beta, BetaStrategy, NmqaConfig};
pub use control::{
    argmax_fano, fano_and_control, fano_factor, population_variance, schedule, ControlRecord,
};
pub use filter::{
    default_r_bounds, emit_data_messages, two_stage_resample, AlphaParticle, DataMessage,
    NmqaFilter, StepReport, TwoStageOutcome,
};
pub use scoring::{
    chi, compute_k1, data_association_H, lambda_power, log_score_g2, map_estimate_h,
    neighborhood, score_g1, score_g2, smear, NeighborTerm, SmearingModel,
};
pub use shared::{Event, SharedDataState};
