//! Velocity-tracking controller built by CLF backstepping through the turn rate.
//!
//! Step one picks `(A_T, Q, R_d) = M_a⁻¹ a_d` with
//! `a_d = a_c + ½K_v(v_c − v)`. The turn rate cannot be commanded directly,
//! so step two picks the roll rate `P` from the CLF condition on
//! `V = ½‖v_c − v‖² + (R − R_d)²/(2μ)`. The time derivatives of `R` and `R_d`
//! along the closed loop, affine in `P`, come from dual numbers evaluated at
//! `P = 0` and `P = 1`.

use serde::{Deserialize, Serialize};

use crate::aircraft_model::{velocity, AircraftModel, AircraftState, ControlInput};
use crate::constraints::ConstraintSet;
use crate::dual::{Dual, Scalar};
use crate::error::{require, Result};
use crate::linalg::{Mat3, Vec3};
use crate::modelfree_rta::{safe_velocity, ModelFreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackingParams {
    /// Position gain K_r (1/s).
    pub k_r: Mat3,
    /// Velocity gain K_v (1/s).
    pub k_v: Mat3,
    pub mu: f64,
    /// Guaranteed decay rate λ of V.
    pub lambda: f64,
}

fn is_spd(m: &Mat3) -> bool {
    m.is_symmetric(1e-12) && m.sym_eigenvalues()[0] > 0.0
}

impl TrackingParams {
    pub fn reference() -> Self {
        Self { k_r: Mat3::diag([0.05; 3]), k_v: Mat3::diag([0.3; 3]), mu: 1e-5, lambda: 0.2 }
    }

    pub fn validate(&self) -> Result<()> {
        require(is_spd(&self.k_r), "k_r", "must be symmetric positive definite")?;
        require(is_spd(&self.k_v), "k_v", "must be symmetric positive definite")?;
        require(self.mu > 0.0 && self.mu.is_finite(), "mu", "must be positive")?;
        let floor = self.k_v.sym_eigenvalues()[0];
        require(
            self.lambda > 0.0 && self.lambda <= floor,
            "lambda",
            format!("must lie in (0, {floor}], the smallest eigenvalue of k_v"),
        )
    }
}

/// Goal `r_g(t) = origin + v t + ½ a t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalTrajectory {
    #[serde(default = "zero3")]
    pub origin: Vec3,
    pub velocity: Vec3,
    #[serde(default = "zero3")]
    pub acceleration: Vec3,
}

fn zero3() -> Vec3 {
    Vec3([0.0; 3])
}

impl GoalTrajectory {
    pub fn constant_velocity(origin: Vec3, velocity: Vec3) -> Self {
        Self { origin, velocity, acceleration: zero3() }
    }

    /// `(r_g, v_g, a_g)` at time t.
    pub fn sample<T: Scalar>(&self, t: T) -> (Vec3<T>, Vec3<T>, Vec3<T>) {
        let a = Vec3::<T>::from_f64(self.acceleration);
        let v = Vec3::<T>::from_f64(self.velocity) + a.scale(t);
        let r = Vec3::<T>::from_f64(self.origin) + Vec3::<T>::from_f64(self.velocity).scale(t) + a.scale(t * t * 0.5);
        (r, v, a)
    }
}

/// A velocity field `v_c(r, t)` that can be evaluated on any scalar type,
/// so its rate along the trajectory is available by differentiation.
pub trait VelocityCommand {
    fn velocity<T: Scalar>(&self, r: &Vec3<T>, t: T) -> Result<Vec3<T>>;
}

/// `v_d = v_g + K_r (r_g − r)`.
pub fn desired_velocity<T: Scalar>(r: &Vec3<T>, t: T, goal: &GoalTrajectory, params: &TrackingParams) -> Vec3<T> {
    let (r_g, v_g, _) = goal.sample(t);
    v_g + Mat3::<T>::from_f64(&params.k_r).mul_vec(&(r_g - *r))
}

/// Analytic total derivative of [`desired_velocity`] along `ṙ = v`.
pub fn desired_velocity_rate<T: Scalar>(v: &Vec3<T>, t: T, goal: &GoalTrajectory, params: &TrackingParams) -> Vec3<T> {
    let (_, v_g, a_g) = goal.sample(t);
    a_g + Mat3::<T>::from_f64(&params.k_r).mul_vec(&(v_g - *v))
}

#[derive(Debug, Clone, Copy)]
pub struct GoalCommand<'a> {
    pub goal: &'a GoalTrajectory,
    pub params: &'a TrackingParams,
}

impl VelocityCommand for GoalCommand<'_> {
    fn velocity<T: Scalar>(&self, r: &Vec3<T>, t: T) -> Result<Vec3<T>> {
        Ok(desired_velocity(r, t, self.goal, self.params))
    }
}

/// The model-free safe velocity `v_s(r, t)` built on the goal command.
#[derive(Debug, Clone, Copy)]
pub struct SafeVelocityCommand<'a> {
    pub goal: GoalCommand<'a>,
    pub set: &'a ConstraintSet,
    pub params: &'a ModelFreeParams,
}

impl VelocityCommand for SafeVelocityCommand<'_> {
    fn velocity<T: Scalar>(&self, r: &Vec3<T>, t: T) -> Result<Vec3<T>> {
        let v_d = self.goal.velocity(r, t)?;
        Ok(safe_velocity(r, t, &v_d, self.set, self.params)?.v_s)
    }
}

/// `(v_c, a_c)` where `a_c` is the derivative of `v_c` along `ṙ = v(ζ)`, `ṫ = 1`.
pub fn command_with_rate<T: Scalar, C: VelocityCommand>(
    cmd: &C,
    x: &AircraftState<T>,
    t: T,
) -> Result<(Vec3<T>, Vec3<T>)> {
    let v = velocity(x);
    let r = x.position();
    let rd = Vec3([0, 1, 2].map(|i| Dual::new(r[i], v[i])));
    let out = cmd.velocity(&rd, Dual::new(t, T::cst(1.0)))?;
    Ok((Vec3(out.0.map(|c| c.re)), Vec3(out.0.map(|c| c.eps))))
}

/// `a_d = a_c + ½ K_v (v_c − v)`.
pub fn desired_accel<T: Scalar>(v_c: &Vec3<T>, a_c: &Vec3<T>, v: &Vec3<T>, params: &TrackingParams) -> Vec3<T> {
    *a_c + Mat3::<T>::from_f64(&params.k_v).mul_vec(&(*v_c - *v)).scale_f(0.5)
}

/// `(A_T, Q, R_d) = M_a⁻¹ a_d`.
pub fn accel_to_inputs<T: Scalar>(x: &AircraftState<T>, a_d: &Vec3<T>, model: &AircraftModel) -> Result<(T, T, T)> {
    let out = model.accel_matrix_inverse(x)?.mul_vec(a_d);
    Ok((out[0], out[1], out[2]))
}

/// Everything the first backstepping step produces at one (x, t).
#[derive(Debug, Clone, Copy)]
pub struct TrackingEval<T = f64> {
    pub v_c: Vec3<T>,
    pub a_c: Vec3<T>,
    pub a_d: Vec3<T>,
    pub a_t: T,
    pub q: T,
    pub r_d: T,
    pub r: T,
    pub lyapunov: T,
}

impl<T: Scalar> TrackingEval<T> {
    pub fn tracking_error(&self, x: &AircraftState<T>) -> Vec3<T> {
        self.v_c - velocity(x)
    }
}

pub fn evaluate<T: Scalar, C: VelocityCommand>(
    x: &AircraftState<T>,
    t: T,
    cmd: &C,
    params: &TrackingParams,
    model: &AircraftModel,
) -> Result<TrackingEval<T>> {
    model.check(x)?;
    let (v_c, a_c) = command_with_rate(cmd, x, t)?;
    let v = velocity(x);
    let a_d = desired_accel(&v_c, &a_c, &v, params);
    let (a_t, q, r_d) = accel_to_inputs(x, &a_d, model)?;
    let r = model.turn_rate(x)?;
    let e = v_c - v;
    let gap = r - r_d;
    let lyapunov = e.norm_sq() * 0.5 + gap * gap / (2.0 * params.mu);
    Ok(TrackingEval { v_c, a_c, a_d, a_t, q, r_d, r, lyapunov })
}

pub fn clf_v<T: Scalar, C: VelocityCommand>(
    x: &AircraftState<T>,
    t: T,
    cmd: &C,
    params: &TrackingParams,
    model: &AircraftModel,
) -> Result<T> {
    Ok(evaluate(x, t, cmd, params, model)?.lyapunov)
}

/// `V̇ + λV = a_P + b_P P` and the chosen roll rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollRate {
    pub p: f64,
    pub a_p: f64,
    pub b_p: f64,
}

/// `0` if `b_P = 0`, else `min(0, −a_P)/b_P`.
pub fn roll_rate_closed_form(a_p: f64, b_p: f64) -> f64 {
    if b_p == 0.0 {
        0.0
    } else {
        (-a_p).min(0.0) / b_p
    }
}

fn rates_along<C: VelocityCommand>(
    x: &AircraftState,
    t: f64,
    u: &ControlInput,
    cmd: &C,
    params: &TrackingParams,
    model: &AircraftModel,
) -> Result<(f64, f64)> {
    let xdot = model.dynamics(x, u)?;
    let ev = evaluate(&x.lift(&xdot), Dual::new(t, 1.0), cmd, params, model)?;
    Ok((ev.r.eps, ev.r_d.eps))
}

pub fn roll_rate<C: VelocityCommand>(
    x: &AircraftState,
    t: f64,
    cmd: &C,
    params: &TrackingParams,
    model: &AircraftModel,
) -> Result<RollRate> {
    let ev = evaluate(x, t, cmd, params, model)?;
    roll_rate_from(x, t, &ev, cmd, params, model)
}

fn roll_rate_from<C: VelocityCommand>(
    x: &AircraftState,
    t: f64,
    ev: &TrackingEval,
    cmd: &C,
    params: &TrackingParams,
    model: &AircraftModel,
) -> Result<RollRate> {
    let (f_r, f_rd) = rates_along(x, t, &ControlInput::new(ev.a_t, 0.0, ev.q), cmd, params, model)?;
    let (r1, rd1) = rates_along(x, t, &ControlInput::new(ev.a_t, 1.0, ev.q), cmd, params, model)?;
    let (g_r, g_rd) = (r1 - f_r, rd1 - f_rd);

    let e = ev.tracking_error(x);
    let m_r = model.accel_matrix(x)?.col(2);
    let k_v = params.k_v;
    let gap = ev.r_d - ev.r;
    let a_p = -0.5 * e.dot(&k_v.mul_vec(&e))
        + e.dot(&m_r) * gap
        + gap * (f_rd - f_r) / params.mu
        + params.lambda * ev.lyapunov;
    let b_p = gap * (g_rd - g_r) / params.mu;
    Ok(RollRate { p: roll_rate_closed_form(a_p, b_p), a_p, b_p })
}

#[derive(Debug, Clone, Copy)]
pub struct TrackOutput {
    pub u: ControlInput,
    pub eval: TrackingEval,
    pub roll: RollRate,
}

pub fn track<C: VelocityCommand>(
    x: &AircraftState,
    t: f64,
    cmd: &C,
    params: &TrackingParams,
    model: &AircraftModel,
) -> Result<TrackOutput> {
    let eval = evaluate(x, t, cmd, params, model)?;
    let roll = roll_rate_from(x, t, &eval, cmd, params, model)?;
    Ok(TrackOutput { u: ControlInput::new(eval.a_t, roll.p, eval.q), eval, roll })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn goal() -> GoalTrajectory {
        GoalTrajectory::constant_velocity(Vec3([0.0; 3]), Vec3([0.0, 161.32, 0.0]))
    }

    #[test]
    fn params_validation() {
        assert!(TrackingParams::reference().validate().is_ok());
        let mut p = TrackingParams::reference();
        p.lambda = 0.31;
        assert!(p.validate().is_err());
        p.lambda = 0.2;
        p.k_v.0[0][1] = 0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn desired_velocity_examples() {
        let p = TrackingParams::reference();
        let g = goal();
        assert_eq!(desired_velocity(&Vec3([0.0; 3]), 0.0, &g, &p), Vec3([0.0, 161.32, 0.0]));
        let r_g = g.sample(4.0).0;
        let delta = Vec3([10.0, -20.0, 4.0]);
        let v = desired_velocity(&(r_g - delta), 4.0, &g, &p);
        assert!((v - (Vec3([0.0, 161.32, 0.0]) + delta.scale(0.05))).max_abs() < 1e-12);
    }

    #[test]
    fn desired_accel_example() {
        let p = TrackingParams::reference();
        let a = desired_accel(&Vec3([1.0, 0.0, 0.0]), &Vec3([0.0; 3]), &Vec3([0.0; 3]), &p);
        assert!((a - Vec3([0.15, 0.0, 0.0])).max_abs() < 1e-15);
    }

    #[test]
    fn accel_to_inputs_level_east() {
        let model = AircraftModel::default();
        let x = AircraftState::level(FRAC_PI_2, 150.0);
        let (a_t, q, r_d) = accel_to_inputs(&x, &Vec3([-3.0, 0.0, 0.0]), &model).unwrap();
        assert!(a_t.abs() < 1e-12 && q.abs() < 1e-12);
        assert_relative_eq!(r_d, 3.0 / 150.0, epsilon = 1e-12);
        let (a_t, q, r_d) = accel_to_inputs(&x, &Vec3([0.0; 3]), &model).unwrap();
        assert_eq!((a_t, q, r_d), (0.0, 0.0, 0.0));
    }

    #[test]
    fn analytic_and_dual_command_rates_agree() {
        let p = TrackingParams::reference();
        let g = goal();
        let cmd = GoalCommand { goal: &g, params: &p };
        let x = AircraftState { n: 40.0, e: -30.0, d: 5.0, phi: 0.2, theta: 0.1, psi: 1.4, v_t: 150.0 };
        let (_, a_c) = command_with_rate(&cmd, &x, 2.0).unwrap();
        let exact = desired_velocity_rate(&velocity(&x), 2.0, &g, &p);
        assert!((a_c - exact).max_abs() < 1e-13);
    }

    #[test]
    fn equilibrium_has_zero_input() {
        let model = AircraftModel::default();
        let p = TrackingParams::reference();
        let g = goal();
        let cmd = GoalCommand { goal: &g, params: &p };
        let x = AircraftState::level(FRAC_PI_2, 161.32);
        let out = track(&x, 0.0, &cmd, &p, &model).unwrap();
        assert!(out.u.to_vec().max_abs() < 1e-12);
        assert!(out.eval.lyapunov.abs() < 1e-20);
        assert!(out.u.p.abs() < 1e-12);
    }

    #[test]
    fn roll_closed_form_examples() {
        assert_eq!(roll_rate_closed_form(1.0, 2.0), -0.5);
        assert_eq!(roll_rate_closed_form(-1.0, 2.0), 0.0);
        assert_eq!(roll_rate_closed_form(3.0, 0.0), 0.0);
    }

    #[test]
    fn clf_condition_holds_by_direct_differentiation() {
        // V̇ computed by a dual number along the closed loop must satisfy V̇ ≤ −λV.
        let model = AircraftModel::default();
        let p = TrackingParams::reference();
        let g = goal();
        let cmd = GoalCommand { goal: &g, params: &p };
        let x = AircraftState { n: 100.0, e: 20.0, d: -3.0, phi: 0.05, theta: 0.02, psi: 1.5, v_t: 158.0 };
        let out = track(&x, 1.0, &cmd, &p, &model).unwrap();
        let xdot = model.dynamics(&x, &out.u).unwrap();
        let v = clf_v(&x.lift(&xdot), Dual::new(1.0, 1.0), &cmd, &p, &model).unwrap();
        let slack = v.eps + p.lambda * v.re;
        assert!(slack <= 1e-9 * v.re.max(1.0), "slack {slack}");
        assert_relative_eq!(slack, out.roll.a_p + out.roll.b_p * out.roll.p, epsilon = 1e-8 * v.re.max(1.0));
    }
}
