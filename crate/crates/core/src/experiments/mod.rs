//! Experiment orchestration: the oracle-rate study, the three forecasting
//! applications, the tracking-error equivalence and the mixing/moment
//! diagnostics. Replications and grid cells run in parallel; every unit
//! derives its RNG stream from the master seed and its index, so reports
//! are pure functions of their configuration.

mod applications;
mod diagnostics;
mod rate;
mod riccati;
pub mod stats;
mod tracking;

pub use applications::{
    run_application, ApplicationConfig, ApplicationName, ApplicationReport, Ar1KalmanRep,
    Ar1KalmanReport, RvGridPoint, RvLatentReport, SvQmleRep, SvQmleReport,
};
pub use diagnostics::{run_diagnostics, DiagnosticsReport, MomentEntry, SeriesMoments};
pub use rate::{run_rate_study, RateRow, RateStudyConfig, RateStudyReport, TExcessSummary};
pub use riccati::{steady_state_kalman, SteadyStateKalman};
pub use tracking::{check_tracking_equivalence, TrackingCheck, TrackingWeights};
