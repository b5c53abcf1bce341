//! Sequential Monte Carlo filtering of single-shot projective qubit measurements.
//!
//! The crate is organised bottom-up:
//!
//! - [`rng`], [`ensemble`], [`resample`], [`grid`]: particle containers, seeded
//!   random streams, multinomial branching and an exact grid posterior used as a
//!   ground truth on small problems.
//! - [`measurement`]: the amplitude-quantized Born-rule likelihood and the Ramsey
//!   signal map.
//! - [`bootstrap`]: the plain bootstrap filter over a scalar phase.
//! - [`nmqa`]: the adaptive two-layer (alpha/beta) filter with neighbourhood
//!   information sharing and Fano-factor measurement scheduling.
//! - [`simworld`]: qubit geometries, true dephasing fields and the simulated
//!   measurement oracle.
//! - [`harness`]: particle-number scaling experiments, CSV/JSON artifacts and the
//!   checks behind `qfilt validate`.
//!
//! Independent repetitions run through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and falls back to a plain loop otherwise.

pub mod bootstrap;
pub mod ensemble;
pub mod error;
pub mod exec;
pub mod grid;
pub mod harness;
pub mod measurement;
pub mod nmqa;
pub mod resample;
pub mod rng;
pub mod simworld;

pub use error::{QfiltError, Result};
pub use rng::SeededRng;
