//! Model-free safe velocity.
//!
//! The position barrier `h_p` is enforced at velocity level with an ISSf
//! margin `σ‖∇h_p‖²`, so that any controller tracking `v_s` with an
//! exponentially decaying Lyapunov function keeps `h_V = h_p − V/(2σ(λ − γ_p))`
//! nonnegative.

use serde::{Deserialize, Serialize};

use crate::constraints::{BarrierEval, ConstraintSet};
use crate::dual::Scalar;
use crate::error::{require, Result, RtaError};
use crate::linalg::{Mat3, Vec3};
use crate::safety_filter::{apply_filter, FilterMode};

/// Below this speed (m/s) the projector onto v_d is undefined.
pub const MIN_DESIRED_SPEED: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFreeParams {
    pub gamma_p: f64,
    /// ISSf margin σ.
    pub sigma: f64,
    /// Relative cost of deviating perpendicular to v_d.
    pub gamma_v: f64,
    pub nu_v: f64,
}

impl ModelFreeParams {
    pub fn reference() -> Self {
        Self { gamma_p: 0.1, sigma: 3.0, gamma_v: 4.0, nu_v: 0.007 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in
            [("gamma_p", self.gamma_p), ("sigma", self.sigma), ("gamma_v", self.gamma_v), ("nu_v", self.nu_v)]
        {
            require(v > 0.0 && v.is_finite(), name, "must be positive")?;
        }
        Ok(())
    }
}

/// `W_v = P_v + (I − P_v)/√Γ_v` with `P_v` the projector onto v_d.
pub fn velocity_weights<T: Scalar>(v_d: &Vec3<T>, gamma_v: f64) -> Result<Mat3<T>> {
    let n2 = v_d.norm_sq();
    let norm = n2.value().sqrt();
    if !(norm >= MIN_DESIRED_SPEED) {
        return Err(RtaError::ZeroDesiredVelocity { norm });
    }
    let proj = Mat3::outer(v_d, v_d).scale(n2.recip());
    let k = 1.0 / gamma_v.sqrt();
    let perp = Mat3::identity().add(&proj.scale(T::cst(-1.0)));
    Ok(proj.add(&perp.scale(T::cst(k))))
}

#[derive(Debug, Clone)]
pub struct SafeVelocityResult<T = f64> {
    pub v_s: Vec3<T>,
    pub a_v: T,
    pub b_v: Vec3<T>,
    /// `ḣ_p(v_s) + γ_p h_p − σ‖∇h_p‖²`.
    pub margin: T,
    pub barrier: BarrierEval<T>,
}

pub fn safe_velocity<T: Scalar>(
    r: &Vec3<T>,
    t: T,
    v_d: &Vec3<T>,
    set: &ConstraintSet,
    params: &ModelFreeParams,
) -> Result<SafeVelocityResult<T>> {
    let w_v = velocity_weights(v_d, params.gamma_v)?;
    let barrier = set.compose_h_p(r, t)?;
    let g = barrier.grad_r;
    let a_v = barrier.rate(v_d) + barrier.value * params.gamma_p - g.norm_sq() * params.sigma;
    let out = apply_filter(v_d, a_v, &g, &w_v, FilterMode::Smooth { nu: params.nu_v });
    let margin = a_v + g.dot(&(out.u - *v_d));
    Ok(SafeVelocityResult { v_s: out.u, a_v, b_v: out.b, margin, barrier })
}

/// `h_p − V/(2σ(λ − γ_p))`.
pub fn h_v(h_p: f64, lyapunov: f64, params: &ModelFreeParams, lambda: f64) -> Result<f64> {
    if !(lambda > params.gamma_p) {
        return Err(RtaError::InvalidGainOrdering { lambda, gamma_p: params.gamma_p });
    }
    Ok(h_p - lyapunov / (2.0 * params.sigma * (lambda - params.gamma_p)))
}
