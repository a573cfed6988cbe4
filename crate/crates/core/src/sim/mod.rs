//! Closed-loop scenario simulation, acceptance checks, sweeps and export.

use std::path::PathBuf;

use thiserror::Error;

use crate::error::RtaError;

pub mod check;
pub mod closed_loop;
pub mod export;
pub mod integrate;
pub mod metrics;
pub mod scenario;

pub use check::{check, evaluate_acceptance, sweep, CheckReport};
pub use closed_loop::{ClosedLoop, StepEval};
pub use export::{export, Format};
pub use integrate::{integrate, Record, TrajectoryLog};
pub use metrics::{compute as compute_metrics, Metrics};
pub use scenario::{Acceptance, ControlUpdate, RtaConfig, Scenario};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cannot read {path}: {source}", path = path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}", path = path.display())]
    Write { path: PathBuf, source: std::io::Error },

    #[error("schema error in {path}: {source}")]
    Schema { path: String, source: serde_json::Error },

    #[error("unsupported schema_version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("invalid scenario: {0}")]
    Invalid(#[from] RtaError),

    #[error("initial state violates {barrier} >= 0 (value {value})")]
    InitialBarrier { barrier: &'static str, value: f64 },

    #[error("unknown or non-numeric sweep parameter `{0}`")]
    UnknownParam(String),
}

/// Load, run and summarise a scenario file.
pub fn run_scenario(path: impl AsRef<std::path::Path>) -> Result<(Scenario, TrajectoryLog, Metrics), SimError> {
    let sc = Scenario::load(path)?;
    let log = integrate(&sc);
    let m = compute_metrics(&sc, &log);
    Ok((sc, log, m))
}
