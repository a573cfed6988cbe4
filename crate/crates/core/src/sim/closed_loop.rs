use crate::aircraft_model::{velocity, AircraftState, ControlInput};
use crate::backstepping_rta::{h_b, rta_backstepping};
use crate::error::Result;
use crate::extended_rta::rta_extended;
use crate::modelfree_rta::h_v;
use crate::tracking_controller::{track, GoalCommand, SafeVelocityCommand};

use super::scenario::{RtaConfig, Scenario};

/// Controller output and monitored quantities at one (x, t).
#[derive(Debug, Clone, PartialEq)]
pub struct StepEval {
    pub u_d: ControlInput,
    pub u: ControlInput,
    pub h_p: f64,
    pub h_members: Vec<f64>,
    /// h_p, h_e, h_b or h_V depending on the strategy.
    pub h_mode: f64,
    /// Velocity-extended barrier, for strategies that build on it.
    pub h_e: Option<f64>,
    /// Tracking Lyapunov function of the command actually tracked.
    pub lyapunov: f64,
    pub intervening: bool,
    pub infeasible: bool,
}

/// Nominal tracker composed with the configured RTA strategy.
pub struct ClosedLoop<'a> {
    sc: &'a Scenario,
}

impl<'a> ClosedLoop<'a> {
    pub fn new(sc: &'a Scenario) -> Self {
        Self { sc }
    }

    pub fn evaluate(&self, x: &AircraftState, t: f64) -> Result<StepEval> {
        let sc = self.sc;
        let model = &sc.model;
        let set = &sc.constraints;
        let goal = GoalCommand { goal: &sc.goal, params: &sc.tracking };
        let nominal = track(x, t, &goal, &sc.tracking, model)?;
        let u_d = nominal.u;
        let hp = set.compose_h_p(&x.position(), t)?;

        let (u, h_mode, h_e, lyapunov, infeasible) = match &sc.rta {
            RtaConfig::Off => (u_d, hp.value, None, nominal.eval.lyapunov, false),
            RtaConfig::Extended(p) => {
                let out = rta_extended(x, t, &u_d, set, p, model)?;
                (out.u, out.barrier, Some(out.barrier), nominal.eval.lyapunov, out.infeasible)
            }
            RtaConfig::Backstepping(p) => {
                let out = rta_backstepping(x, t, &u_d, set, p, model)?;
                let he = h_b(x, t, set, p, model)?.h_e;
                (out.u, out.barrier, Some(he), nominal.eval.lyapunov, out.infeasible)
            }
            RtaConfig::ModelFree(p) => {
                let cmd = SafeVelocityCommand { goal, set, params: p };
                let safe = track(x, t, &cmd, &sc.tracking, model)?;
                let hv = h_v(hp.value, safe.eval.lyapunov, p, sc.tracking.lambda)?;
                let he = set.compose_h_e(&x.position(), &velocity(x), t, p.gamma_p)?.value;
                (safe.u, hv, Some(he), safe.eval.lyapunov, false)
            }
        };
        let intervening = u.to_vec() != u_d.to_vec();
        Ok(StepEval {
            u_d,
            u,
            h_p: hp.value,
            h_members: hp.per_constraint,
            h_mode,
            h_e,
            lyapunov,
            intervening,
            infeasible,
        })
    }
}
