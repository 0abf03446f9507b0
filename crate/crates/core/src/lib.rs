//! Simulation, estimation and experiment harness for empirical risk
//! minimization (ERM) over recursive threshold forecasting algorithms.
//!
//! The crate is organized around five subsystems:
//!
//! - [`dgp`] — parameter-driven data generating processes (hidden chain +
//!   observation equation), stability validation and the application presets.
//! - [`forecaster`] — the K-regime recursive threshold forecaster, its
//!   dominating process and the joint companion state.
//! - [`loss`] — the Bregman loss family with exact gradients, the generalized
//!   triangle equality and curvature certification.
//! - [`erm`] — empirical risk, multi-start direct-search fitting, and
//!   realized / Monte Carlo out-of-sample risk estimators.
//! - [`experiments`] — the oracle-rate study, forecasting applications,
//!   tracking-error equivalence and mixing/moment diagnostics.
//!
//! All randomness flows through [`seed`]: every parallel unit of work derives
//! an independent ChaCha stream from `(master_seed, unit_index)`, so results
//! are reproducible bit-for-bit regardless of thread count.

pub mod dgp;
pub mod erm;
pub mod error;
pub mod experiments;
pub mod forecaster;
pub mod loss;
pub mod report;
pub mod seed;

pub use error::{Error, Result};
