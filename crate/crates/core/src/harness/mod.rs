//! Experiment orchestration: configs, the scaling study, fits and artifacts.

mod bootstrap_study;
mod config;
mod experiment;
mod fit;
mod presets;
pub mod validate;

pub use bootstrap_study::{run_bootstrap_study, BootstrapStudyConfig, BootstrapStudyResult};
pub use config::{ExperimentConfig, WorldConfig};
pub use experiment::{
    manifest_json, results_csv, run_scaling_experiment, run_scaling_experiment_with, run_trajectory,
    write_artifacts, CellSeeds, FailedAttempt, RunRecord, ScalingResult, CSV_HEADER, MAX_ATTEMPTS,
};
pub use fit::{compute_l, fit_epsilon, mean_sem, median, ScalingFit};
pub use presets::{
    demo_experiments, no_sharing_params, tuned_experiment, tuned_params, DemoCase, TunedParams,
    DEFAULT_N_ALPHA_GRID,
};
