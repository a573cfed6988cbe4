use serde::Serialize;

use crate::aircraft_model::{AircraftModel, AircraftState, ControlInput, STATE_DIM};
use crate::error::{Result, RtaError};

use super::closed_loop::{ClosedLoop, StepEval};
use super::scenario::{ControlUpdate, Scenario};

/// One logged control step.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub t: f64,
    /// Unwrapped state; angles are wrapped only on export.
    pub x: AircraftState,
    pub eval: StepEval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Abort {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Warning {
    pub t: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub scenario: String,
    pub dt: f64,
    pub constraint_count: usize,
    pub records: Vec<Record>,
    pub abort: Option<Abort>,
    pub warnings: Vec<Warning>,
}

/// Classic fourth-order Runge-Kutta step of `ẋ = rhs(x, τ)`.
pub fn rk4_step<F>(x: &AircraftState, t: f64, dt: f64, mut rhs: F) -> Result<AircraftState>
where
    F: FnMut(&AircraftState, f64) -> Result<[f64; STATE_DIM]>,
{
    let k1 = rhs(x, t)?;
    let k2 = rhs(&x.offset(&k1, 0.5 * dt), t + 0.5 * dt)?;
    let k3 = rhs(&x.offset(&k2, 0.5 * dt), t + 0.5 * dt)?;
    let k4 = rhs(&x.offset(&k3, dt), t + dt)?;
    let mut incr = [0.0; STATE_DIM];
    for i in 0..STATE_DIM {
        incr[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    let next = x.offset(&incr, dt);
    if !next.is_finite() {
        return Err(RtaError::NonFinite("integrated state"));
    }
    Ok(next)
}

/// Open-loop propagation with a fixed input, used for zero-order hold.
pub fn hold_step(model: &AircraftModel, x: &AircraftState, t: f64, dt: f64, u: &ControlInput) -> Result<AircraftState> {
    rk4_step(x, t, dt, |x, _| model.dynamics(x, u))
}

/// Runs the scenario to its horizon or to the first numerical failure.
pub fn integrate(sc: &Scenario) -> TrajectoryLog {
    let cl = ClosedLoop::new(sc);
    let steps = sc.step_count();
    let mut log = TrajectoryLog {
        scenario: sc.name.clone(),
        dt: sc.dt,
        constraint_count: sc.constraints.len(),
        records: Vec::with_capacity(steps + 1),
        abort: None,
        warnings: Vec::new(),
    };
    let mut x = sc.initial_state;
    for k in 0..=steps {
        let t = k as f64 * sc.dt;
        let eval = match cl.evaluate(&x, t) {
            Ok(e) => e,
            Err(err) => {
                log.abort = Some(Abort { t, reason: err.to_string() });
                break;
            }
        };
        if eval.infeasible {
            log.warnings.push(Warning { t, message: "safety filter infeasible: b = 0 with a < 0".into() });
        }
        let u = eval.u;
        log.records.push(Record { t, x, eval });
        if k == steps {
            break;
        }
        let next = match sc.control_update {
            ControlUpdate::ZeroOrderHold => hold_step(&sc.model, &x, t, sc.dt, &u),
            ControlUpdate::PerStage => rk4_step(&x, t, sc.dt, |xs, ts| {
                let us = if ts == t && xs == &x { u } else { cl.evaluate(xs, ts)?.u };
                sc.model.dynamics(xs, &us)
            }),
        };
        match next {
            Ok(n) => x = n,
            Err(err) => {
                log.abort = Some(Abort { t, reason: err.to_string() });
                break;
            }
        }
    }
    log
}

impl TrajectoryLog {
    pub fn final_record(&self) -> Option<&Record> {
        self.records.last()
    }

    pub fn completed(&self) -> bool {
        self.abort.is_none()
    }
}
