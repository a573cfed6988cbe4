//! 3D Dubins kinematics of a fixed-wing aircraft.
//!
//! State `x = (n, e, d, φ, θ, ψ, V_T)`, input `u = (A_T, P, Q)`. The turn rate
//! `R = (g_D / V_T) sin φ cos θ` is not an input: the aircraft has to roll to
//! turn. The acceleration map `M_a` acts on the *permuted* triple
//! `(A_T, Q, R)`; conversions between the two orderings happen only in
//! [`AircraftModel::accel_matrix`] and its inverse.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Scalar};
use crate::error::{Result, RtaError};
use crate::linalg::{Mat3, Vec3};

pub const STATE_DIM: usize = 7;
pub const INPUT_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AircraftState<T = f64> {
    pub n: T,
    pub e: T,
    pub d: T,
    pub phi: T,
    pub theta: T,
    pub psi: T,
    pub v_t: T,
}

impl<T: Scalar> AircraftState<T> {
    pub fn from_array(a: [T; STATE_DIM]) -> Self {
        let [n, e, d, phi, theta, psi, v_t] = a;
        Self { n, e, d, phi, theta, psi, v_t }
    }

    pub fn to_array(&self) -> [T; STATE_DIM] {
        [self.n, self.e, self.d, self.phi, self.theta, self.psi, self.v_t]
    }

    pub fn position(&self) -> Vec3<T> {
        Vec3([self.n, self.e, self.d])
    }

    pub fn value(&self) -> AircraftState<f64> {
        AircraftState::from_array(self.to_array().map(Scalar::value))
    }

    pub fn from_f64(x: &AircraftState<f64>) -> Self {
        Self::from_array(x.to_array().map(T::cst))
    }

    /// Dual-valued copy whose tangent is `dir`.
    pub fn lift(&self, dir: &[T; STATE_DIM]) -> AircraftState<Dual<T>> {
        let a = self.to_array();
        AircraftState::from_array([0, 1, 2, 3, 4, 5, 6].map(|i| Dual::new(a[i], dir[i])))
    }
}

impl AircraftState<f64> {
    /// Wings-level flight at the origin with the given heading and speed.
    pub fn level(psi: f64, v_t: f64) -> Self {
        Self { n: 0.0, e: 0.0, d: 0.0, phi: 0.0, theta: 0.0, psi, v_t }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// `x + h·dx`, used by the integrator.
    pub fn offset(&self, dx: &[f64; STATE_DIM], h: f64) -> Self {
        let mut a = self.to_array();
        for (c, d) in a.iter_mut().zip(dx) {
            *c += h * d;
        }
        Self::from_array(a)
    }

    /// Copy with the Euler angles wrapped to (−π, π].
    pub fn wrapped(&self) -> Self {
        Self { phi: wrap_angle(self.phi), theta: wrap_angle(self.theta), psi: wrap_angle(self.psi), ..*self }
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Longitudinal acceleration, roll rate and pitch rate, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput<T = f64> {
    pub a_t: T,
    pub p: T,
    pub q: T,
}

impl<T: Scalar> ControlInput<T> {
    pub fn new(a_t: T, p: T, q: T) -> Self {
        Self { a_t, p, q }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn to_vec(&self) -> Vec3<T> {
        Vec3([self.a_t, self.p, self.q])
    }

    pub fn from_vec(v: Vec3<T>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn from_f64(u: &ControlInput<f64>) -> Self {
        Self::new(T::cst(u.a_t), T::cst(u.p), T::cst(u.q))
    }
}

impl ControlInput<f64> {
    pub fn is_finite(&self) -> bool {
        self.a_t.is_finite() && self.p.is_finite() && self.q.is_finite()
    }
}

/// Inertial velocity `(V cθ cψ, V cθ sψ, −V sθ)`.
pub fn velocity<T: Scalar>(x: &AircraftState<T>) -> Vec3<T> {
    let (ct, st) = (x.theta.cos(), x.theta.sin());
    Vec3([x.v_t * ct * x.psi.cos(), x.v_t * ct * x.psi.sin(), -(x.v_t * st)])
}

/// Columns of the body-to-earth rotation for 3-2-1 Euler angles: nose,
/// right wing and belly directions in north-east-down coordinates.
pub fn body_axes<T: Scalar>(x: &AircraftState<T>) -> [Vec3<T>; 3] {
    let (sf, cf) = (x.phi.sin(), x.phi.cos());
    let (st, ct) = (x.theta.sin(), x.theta.cos());
    let (ss, cs) = (x.psi.sin(), x.psi.cos());
    let nose = Vec3([ct * cs, ct * ss, -st]);
    let wing = Vec3([cs * st * sf - ss * cf, ss * st * sf + cs * cf, ct * sf]);
    let belly = Vec3([cs * st * cf + ss * sf, ss * st * cf - cs * sf, ct * cf]);
    [nose, wing, belly]
}

/// Model constants and singularity guards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AircraftModel {
    /// Gravitational acceleration g_D (m/s²).
    pub g_d: f64,
    /// SingularSpeed is raised at or below this speed (m/s).
    #[serde(default = "default_min_speed")]
    pub min_speed: f64,
    /// SingularPitch is raised when |θ| ≥ π/2 − pitch_margin (rad).
    #[serde(default = "default_pitch_margin")]
    pub pitch_margin: f64,
}

fn default_min_speed() -> f64 {
    1.0
}

fn default_pitch_margin() -> f64 {
    1e-3
}

impl Default for AircraftModel {
    fn default() -> Self {
        Self { g_d: 9.81, min_speed: default_min_speed(), pitch_margin: default_pitch_margin() }
    }
}

impl AircraftModel {
    pub fn with_gravity(g_d: f64) -> Self {
        Self { g_d, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        crate::error::require(self.g_d > 0.0 && self.g_d.is_finite(), "g_d", "must be positive")?;
        crate::error::require(self.min_speed > 0.0, "min_speed", "must be positive")?;
        crate::error::require(
            self.pitch_margin > 0.0 && self.pitch_margin < FRAC_PI_2,
            "pitch_margin",
            "must lie in (0, π/2)",
        )
    }

    pub fn check_speed<T: Scalar>(&self, x: &AircraftState<T>) -> Result<()> {
        let v = x.v_t.value();
        if !v.is_finite() {
            return Err(RtaError::NonFinite("state speed"));
        }
        if v <= self.min_speed {
            return Err(RtaError::SingularSpeed { speed: v, floor: self.min_speed });
        }
        Ok(())
    }

    pub fn check_pitch<T: Scalar>(&self, x: &AircraftState<T>) -> Result<()> {
        let th = x.theta.value();
        if !th.is_finite() {
            return Err(RtaError::NonFinite("state pitch"));
        }
        if th.abs() >= FRAC_PI_2 - self.pitch_margin {
            return Err(RtaError::SingularPitch { theta: th, margin: self.pitch_margin });
        }
        Ok(())
    }

    /// Full validity check: finite, above the speed floor, away from ±π/2 pitch.
    pub fn check<T: Scalar>(&self, x: &AircraftState<T>) -> Result<()> {
        if !x.value().is_finite() {
            return Err(RtaError::NonFinite("aircraft state"));
        }
        self.check_speed(x)?;
        self.check_pitch(x)
    }

    /// Coordinated-turn yaw-axis rate R = (g_D/V_T) sin φ cos θ.
    pub fn turn_rate<T: Scalar>(&self, x: &AircraftState<T>) -> Result<T> {
        self.check_speed(x)?;
        Ok(x.phi.sin() * x.theta.cos() * self.g_d / x.v_t)
    }

    /// Drift vector f(x).
    pub fn drift<T: Scalar>(&self, x: &AircraftState<T>) -> Result<[T; STATE_DIM]> {
        self.check(x)?;
        let v = velocity(x);
        let (sf, cf) = (x.phi.sin(), x.phi.cos());
        let k = x.v_t.recip() * self.g_d;
        Ok([v[0], v[1], v[2], k * sf * cf * x.theta.sin(), -(k * sf * sf * x.theta.cos()), k * sf * cf, T::zero()])
    }

    /// Input matrix g(x), rows indexed by state, columns by (A_T, P, Q).
    pub fn input_matrix<T: Scalar>(&self, x: &AircraftState<T>) -> Result<[[T; INPUT_DIM]; STATE_DIM]> {
        self.check(x)?;
        let (z, one) = (T::zero(), T::cst(1.0));
        let (sf, cf) = (x.phi.sin(), x.phi.cos());
        Ok([
            [z, z, z],
            [z, z, z],
            [z, z, z],
            [z, one, sf * x.theta.tan()],
            [z, z, cf],
            [z, z, sf / x.theta.cos()],
            [one, z, z],
        ])
    }

    /// ẋ = f(x) + g(x) u.
    pub fn dynamics<T: Scalar>(&self, x: &AircraftState<T>, u: &ControlInput<T>) -> Result<[T; STATE_DIM]> {
        let f = self.drift(x)?;
        let g = self.input_matrix(x)?;
        let u = [u.a_t, u.p, u.q];
        let mut out = f;
        for (o, row) in out.iter_mut().zip(g.iter()) {
            *o += row[0] * u[0] + row[1] * u[1] + row[2] * u[2];
        }
        Ok(out)
    }

    /// M_a with v̇ = M_a · (A_T, Q, R).
    pub fn accel_matrix<T: Scalar>(&self, x: &AircraftState<T>) -> Result<Mat3<T>> {
        self.check(x)?;
        let [nose, wing, belly] = body_axes(x);
        Ok(Mat3::from_cols([nose, -belly.scale(x.v_t), wing.scale(x.v_t)]))
    }

    /// M_a⁻¹, rows (nose, −belly/V_T, wing/V_T): the columns of M_a are
    /// orthogonal with norms (1, V_T, V_T).
    pub fn accel_matrix_inverse<T: Scalar>(&self, x: &AircraftState<T>) -> Result<Mat3<T>> {
        self.check(x)?;
        let [nose, wing, belly] = body_axes(x);
        let inv_v = x.v_t.recip();
        Ok(Mat3::from_rows([nose, -belly.scale(inv_v), wing.scale(inv_v)]))
    }

    /// Third row of M_a⁻¹: maps an inertial acceleration to the turn rate R.
    pub fn w_r_row<T: Scalar>(&self, x: &AircraftState<T>) -> Result<Vec3<T>> {
        self.check(x)?;
        let [_, wing, _] = body_axes(x);
        Ok(wing.scale(x.v_t.recip()))
    }
}

/// (A_T, Q, R) → M_a-ordered vector.
pub fn accel_triple<T: Scalar>(a_t: T, q: T, r: T) -> Vec3<T> {
    Vec3([a_t, q, r])
}
