//! Velocity-extended barrier `h_e = h_p + ḣ_p/γ_p` and its safety filter.
//!
//! `h_e` depends on the state only through `r` and `v(ζ)`, so its derivative
//! involves `v̇ = M_a (A_T, Q, R)` and never the roll rate `P`. The filter
//! therefore acts on `A_T` and `Q` only.

use serde::{Deserialize, Serialize};

use crate::aircraft_model::{velocity, AircraftModel, AircraftState, ControlInput};
use crate::constraints::{BarrierEval, Constraint, ConstraintSet};
use crate::dual::Scalar;
use crate::error::{require, Result};
use crate::linalg::Vec3;
use crate::safety_filter::{apply_filter, ClassKappaLinear, FilterMode, WeightFactor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendedParams {
    /// Extension gain γ_p (1/s).
    pub gamma_p: f64,
    /// Outer class-K gain.
    pub alpha: ClassKappaLinear,
    /// Input weights over (A_T, P, Q).
    pub weights: WeightFactor,
    #[serde(default = "hard")]
    pub filter: FilterMode,
}

fn hard() -> FilterMode {
    FilterMode::Hard
}

impl ExtendedParams {
    pub fn reference() -> Self {
        Self {
            gamma_p: 0.1,
            alpha: ClassKappaLinear { gamma: 0.1 },
            weights: WeightFactor::diag([6.0, 0.6, 0.1]).expect("positive diagonal"),
            filter: FilterMode::Hard,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.gamma_p > 0.0 && self.gamma_p.is_finite(), "gamma_p", "must be positive")?;
        ClassKappaLinear::new(self.alpha.gamma)?;
        self.filter.validate()?;
        let w = self.weights.matrix();
        require(
            w.0[1][0] == 0.0 && w.0[1][2] == 0.0 && w.0[0][1] == 0.0 && w.0[2][1] == 0.0,
            "weights",
            "the roll-rate channel must not be coupled to A_T or Q",
        )
    }
}

pub fn h_e_member<T: Scalar>(r: &Vec3<T>, v: &Vec3<T>, t: T, constraint: &Constraint, gamma_p: f64) -> Result<T> {
    Ok(constraint.extended_barrier(r, v, t, gamma_p)?.value)
}

pub fn h_e_composed<T: Scalar>(
    r: &Vec3<T>,
    v: &Vec3<T>,
    t: T,
    set: &ConstraintSet,
    gamma_p: f64,
) -> Result<BarrierEval<T>> {
    set.compose_h_e(r, v, t, gamma_p)
}

/// `ḣ_e(x, t, u) = drift + input_row · u`.
#[derive(Debug, Clone)]
pub struct ExtendedAffine<T = f64> {
    pub barrier: BarrierEval<T>,
    pub drift: T,
    /// Coefficients of (A_T, P, Q); the P entry is always zero.
    pub input_row: Vec3<T>,
}

pub fn hdot_e_affine<T: Scalar>(
    x: &AircraftState<T>,
    t: T,
    set: &ConstraintSet,
    gamma_p: f64,
    model: &AircraftModel,
) -> Result<ExtendedAffine<T>> {
    let m_a = model.accel_matrix(x)?;
    let turn = model.turn_rate(x)?;
    let v = velocity(x);
    let barrier = set.compose_h_e(&x.position(), &v, t, gamma_p)?;
    let gv = barrier.grad_v;
    let drift = barrier.rate(&v) + gv.dot(&m_a.col(2)) * turn;
    let input_row = Vec3([gv.dot(&m_a.col(0)), T::zero(), gv.dot(&m_a.col(1))]);
    Ok(ExtendedAffine { barrier, drift, input_row })
}

/// Result of one RTA evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtaOutput {
    pub u: ControlInput,
    /// The barrier the filter enforces (h_e or h_b).
    pub barrier: f64,
    /// `ḣ + α(h)` at the desired input.
    pub a: f64,
    /// `ḣ + α(h)` at the filtered input.
    pub residual: f64,
    pub active: bool,
    pub infeasible: bool,
}

pub fn rta_extended(
    x: &AircraftState,
    t: f64,
    u_d: &ControlInput,
    set: &ConstraintSet,
    params: &ExtendedParams,
    model: &AircraftModel,
) -> Result<RtaOutput> {
    let aff = hdot_e_affine(x, t, set, params.gamma_p, model)?;
    let ud = u_d.to_vec();
    let a = aff.drift + aff.input_row.dot(&ud) + params.alpha.eval(aff.barrier.value);
    let out = apply_filter(&ud, a, &aff.input_row, params.weights.matrix(), params.filter);
    // b has no P component and W keeps that channel decoupled
    let u = ControlInput::new(out.u[0], u_d.p, out.u[2]);
    let residual = a + aff.input_row.dot(&(u.to_vec() - ud));
    Ok(RtaOutput { u, barrier: aff.barrier.value, a, residual, active: out.active, infeasible: out.infeasible })
}
