//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by simulation, fitting and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument failed a structural invariant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The simulated recursion produced a non-finite value.
    #[error("simulation diverged at t={t}: h={h}, y={y}")]
    SimulationDiverged { t: usize, h: f64, y: f64 },

    /// A preset name was not recognized.
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    /// A preset parameter was outside its documented range.
    #[error("parameter `{name}` out of range: {value} (expected {expected})")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The requested regime count violates the moment constraint K < (r_m - 2) / 3.
    #[error("partition too large: K={k} requires K < (r_m - 2)/3 = {limit} for r_m={r_m}")]
    PartitionTooLarge { k: usize, r_m: u32, limit: f64 },

    /// A loss was evaluated outside its domain.
    #[error("loss domain violation: argument `{arg}` = {value} not in {domain}")]
    LossDomain {
        arg: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A loss is incompatible with the forecast space / observation space.
    #[error("incompatible loss/space pairing: {0}")]
    Pairing(String),

    /// Sequence lengths did not line up.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// The optimizer exhausted all restarts without a usable result.
    #[error("fit failed: {0}")]
    FitFailed(String),

    /// More than the tolerated fraction of study units failed.
    #[error("study failed: {failed} of {total} units errored (first: {first})")]
    StudyFailed {
        failed: usize,
        total: usize,
        first: String,
    },

    /// Scalar minimization could not bracket a minimum.
    #[error("scalar search bracket failure: {0}")]
    BracketFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
