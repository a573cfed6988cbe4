use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aircraft_model::{AircraftModel, AircraftState};
use crate::backstepping_rta::BacksteppingParams;
use crate::constraints::ConstraintSet;
use crate::error::RtaError;
use crate::extended_rta::ExtendedParams;
use crate::modelfree_rta::ModelFreeParams;
use crate::tracking_controller::{GoalTrajectory, TrackingParams};

use super::closed_loop::ClosedLoop;
use super::SimError;

pub const SCHEMA_VERSION: u32 = 1;

/// When the controller is evaluated inside an integration step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlUpdate {
    /// Once per step at the step's start state, held over the step.
    #[default]
    ZeroOrderHold,
    /// At every Runge-Kutta stage; the logged input is the first-stage one.
    PerStage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum RtaConfig {
    Off,
    Extended(ExtendedParams),
    Backstepping(BacksteppingParams),
    #[serde(rename = "modelfree")]
    ModelFree(ModelFreeParams),
}

impl RtaConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RtaConfig::Off => "off",
            RtaConfig::Extended(_) => "extended",
            RtaConfig::Backstepping(_) => "backstepping",
            RtaConfig::ModelFree(_) => "modelfree",
        }
    }

    /// Name of the barrier logged in the `h_mode` column.
    pub fn barrier_name(&self) -> &'static str {
        match self {
            RtaConfig::Off => "h_p",
            RtaConfig::Extended(_) => "h_e",
            RtaConfig::Backstepping(_) => "h_b",
            RtaConfig::ModelFree(_) => "h_V",
        }
    }
}

/// Pass/fail thresholds evaluated by `check`. Absent entries are not checked.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Acceptance {
    /// Lower bound on the composed position barrier.
    pub min_h_p: Option<f64>,
    /// Lower bound on every individual constraint barrier.
    pub min_h_members: Option<f64>,
    /// Lower bound on the mode barrier (h_e, h_b or h_V).
    pub min_h_mode: Option<f64>,
    /// The roll rate must equal the desired roll rate bit for bit.
    #[serde(default)]
    pub roll_transparent: bool,
    /// Some step must have `|P − P_d|` above this value.
    pub roll_engaged: Option<f64>,
    /// Fail on any step where the filter had no usable input direction.
    #[serde(default)]
    pub forbid_infeasible: bool,
    /// The speed must drop below this value (m/s) at some step.
    pub speed_below: Option<f64>,
    /// Bound on `|d|` over the run (m).
    pub max_abs_down: Option<f64>,
    /// A singularity abort counts as a pass.
    #[serde(default)]
    pub allow_abort: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    /// Free-form provenance and assumptions.
    #[serde(default)]
    pub notes: Vec<String>,
    pub initial_state: AircraftState,
    pub horizon: f64,
    pub dt: f64,
    #[serde(default)]
    pub control_update: ControlUpdate,
    #[serde(default)]
    pub model: AircraftModel,
    pub rta: RtaConfig,
    pub constraints: ConstraintSet,
    pub goal: GoalTrajectory,
    #[serde(default = "TrackingParams::reference")]
    pub tracking: TrackingParams,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub acceptance: Acceptance,
}

impl Scenario {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, SimError> {
        let sc: Scenario =
            serde_json::from_str(text).map_err(|source| SimError::Schema { path: origin.to_string(), source })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| SimError::Read { path: path.to_path_buf(), source })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    pub fn step_count(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Parameter, state and initial-barrier checks.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SimError::Version { found: self.schema_version, expected: SCHEMA_VERSION });
        }
        let bad = |name: &'static str, reason: &str| {
            SimError::Invalid(RtaError::InvalidParameter { name, reason: reason.to_string() })
        };
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(bad("dt", "must be positive"));
        }
        if !(self.horizon > self.dt && self.horizon.is_finite()) {
            return Err(bad("horizon", "must exceed dt"));
        }
        self.model.validate()?;
        self.constraints.validate()?;
        self.tracking.validate()?;
        match &self.rta {
            RtaConfig::Off => {}
            RtaConfig::Extended(p) => p.validate()?,
            RtaConfig::Backstepping(p) => p.validate()?,
            RtaConfig::ModelFree(p) => {
                p.validate()?;
                if !(self.tracking.lambda > p.gamma_p) {
                    return Err(
                        RtaError::InvalidGainOrdering { lambda: self.tracking.lambda, gamma_p: p.gamma_p }.into()
                    );
                }
            }
        }
        self.model.check(&self.initial_state)?;

        let eval = ClosedLoop::new(self).evaluate(&self.initial_state, 0.0)?;
        if eval.h_p < 0.0 {
            return Err(SimError::InitialBarrier { barrier: "h_p", value: eval.h_p });
        }
        if eval.h_mode < 0.0 {
            return Err(SimError::InitialBarrier { barrier: self.rta.barrier_name(), value: eval.h_mode });
        }
        Ok(())
    }
}
