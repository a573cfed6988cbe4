//! Backstepping barrier `h_b = h_e − (R_s − R)²/(2μ_e)`.
//!
//! A smooth inner filter on the inertial acceleration gives the safe
//! acceleration `a_s`; its turn-rate component `R_s` becomes the reference
//! the actual turn rate is penalised against. Because `R` depends on the
//! roll angle, the outer filter on `h_b` engages all three inputs. All
//! derivatives of `h_b` come from forward-mode duals threaded through the
//! whole pipeline.

use serde::{Deserialize, Serialize};

use crate::aircraft_model::{velocity, AircraftModel, AircraftState, ControlInput, STATE_DIM};
use crate::constraints::ConstraintSet;
use crate::dual::{Dual, Scalar};
use crate::error::{require, Result};
use crate::extended_rta::RtaOutput;
use crate::linalg::{Mat3, Vec3};
use crate::safety_filter::{apply_filter, ClassKappaLinear, FilterMode, WeightFactor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BacksteppingParams {
    pub gamma_p: f64,
    /// Inner class-K gain γ_e.
    pub alpha_e: ClassKappaLinear,
    /// Acceleration weights W_e.
    pub weights_e: WeightFactor,
    pub nu_e: f64,
    /// Penalty scale μ_e.
    pub mu_e: f64,
    pub alpha: ClassKappaLinear,
    pub weights: WeightFactor,
    #[serde(default = "hard")]
    pub filter: FilterMode,
}

fn hard() -> FilterMode {
    FilterMode::Hard
}

impl BacksteppingParams {
    pub fn reference() -> Self {
        Self {
            gamma_p: 0.1,
            alpha_e: ClassKappaLinear { gamma: 0.1 },
            weights_e: WeightFactor::identity(),
            nu_e: 1.0,
            mu_e: 1e-4,
            alpha: ClassKappaLinear { gamma: 0.1 },
            weights: WeightFactor::diag([6.0, 0.6, 0.1]).expect("positive diagonal"),
            filter: FilterMode::Hard,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.gamma_p > 0.0 && self.gamma_p.is_finite(), "gamma_p", "must be positive")?;
        ClassKappaLinear::new(self.alpha_e.gamma)?;
        ClassKappaLinear::new(self.alpha.gamma)?;
        require(self.nu_e > 0.0 && self.nu_e.is_finite(), "nu_e", "must be positive")?;
        require(self.mu_e > 0.0 && self.mu_e.is_finite(), "mu_e", "must be positive")?;
        self.filter.validate()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SafeAccel<T = f64> {
    pub a_s: Vec3<T>,
    pub h_e: T,
    pub a_e: T,
    pub b_e: Vec3<T>,
}

/// `a_s = Λ_smooth(a_e, ‖b_e‖) W_e b_eᵀ` for zero desired acceleration.
pub fn safe_accel<T: Scalar>(
    x: &AircraftState<T>,
    t: T,
    set: &ConstraintSet,
    params: &BacksteppingParams,
    model: &AircraftModel,
) -> Result<SafeAccel<T>> {
    model.check(x)?;
    let v = velocity(x);
    let he = set.compose_h_e(&x.position(), &v, t, params.gamma_p)?;
    let a_e = he.rate(&v) + params.alpha_e.eval(he.value);
    let w_e = Mat3::<T>::from_f64(params.weights_e.matrix());
    let out = apply_filter(&Vec3::zero(), a_e, &he.grad_v, &w_e, FilterMode::Smooth { nu: params.nu_e });
    Ok(SafeAccel { a_s: out.u, h_e: he.value, a_e, b_e: out.b })
}

pub fn safe_turn_rate<T: Scalar>(
    x: &AircraftState<T>,
    t: T,
    set: &ConstraintSet,
    params: &BacksteppingParams,
    model: &AircraftModel,
) -> Result<T> {
    let s = safe_accel(x, t, set, params, model)?;
    Ok(model.w_r_row(x)?.dot(&s.a_s))
}

#[derive(Debug, Clone, Copy)]
pub struct BacksteppingEval<T = f64> {
    pub h_b: T,
    pub h_e: T,
    pub r_s: T,
    pub r: T,
}

pub fn h_b<T: Scalar>(
    x: &AircraftState<T>,
    t: T,
    set: &ConstraintSet,
    params: &BacksteppingParams,
    model: &AircraftModel,
) -> Result<BacksteppingEval<T>> {
    let s = safe_accel(x, t, set, params, model)?;
    let r_s = model.w_r_row(x)?.dot(&s.a_s);
    let r = model.turn_rate(x)?;
    let gap = r_s - r;
    Ok(BacksteppingEval { h_b: s.h_e - gap * gap / (2.0 * params.mu_e), h_e: s.h_e, r_s, r })
}

/// Derivative of h_b along the direction `(dx, dt)` in (x, t)-space.
pub fn directional_h_b(
    x: &AircraftState,
    t: f64,
    dx: &[f64; STATE_DIM],
    dt: f64,
    set: &ConstraintSet,
    params: &BacksteppingParams,
    model: &AircraftModel,
) -> Result<Dual> {
    Ok(h_b(&x.lift(dx), Dual::new(t, dt), set, params, model)?.h_b)
}

/// `(h_b, ∂h_b/∂x, ∂h_b/∂t)`.
pub fn grad_h_b(
    x: &AircraftState,
    t: f64,
    set: &ConstraintSet,
    params: &BacksteppingParams,
    model: &AircraftModel,
) -> Result<(f64, [f64; STATE_DIM], f64)> {
    let mut grad = [0.0; STATE_DIM];
    let mut value = 0.0;
    for (i, g) in grad.iter_mut().enumerate() {
        let mut e = [0.0; STATE_DIM];
        e[i] = 1.0;
        let d = directional_h_b(x, t, &e, 0.0, set, params, model)?;
        value = d.re;
        *g = d.eps;
    }
    let dt = directional_h_b(x, t, &[0.0; STATE_DIM], 1.0, set, params, model)?.eps;
    Ok((value, grad, dt))
}

pub fn rta_backstepping(
    x: &AircraftState,
    t: f64,
    u_d: &ControlInput,
    set: &ConstraintSet,
    params: &BacksteppingParams,
    model: &AircraftModel,
) -> Result<RtaOutput> {
    let xdot = model.dynamics(x, u_d)?;
    let along = directional_h_b(x, t, &xdot, 1.0, set, params, model)?;
    let g = model.input_matrix(x)?;
    let mut b_raw = [0.0; 3];
    for (j, b) in b_raw.iter_mut().enumerate() {
        let col = g.map(|row| row[j]);
        *b = directional_h_b(x, t, &col, 0.0, set, params, model)?.eps;
    }
    let b_raw = Vec3(b_raw);
    let a = along.eps + params.alpha.eval(along.re);
    let ud = u_d.to_vec();
    let out = apply_filter(&ud, a, &b_raw, params.weights.matrix(), params.filter);
    let residual = a + b_raw.dot(&(out.u - ud));
    Ok(RtaOutput {
        u: ControlInput::from_vec(out.u),
        barrier: along.re,
        a,
        residual,
        active: out.active,
        infeasible: out.infeasible,
    })
}
