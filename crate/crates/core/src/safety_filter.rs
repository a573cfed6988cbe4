//! Closed-form minimum-deviation safety filter for a single affine CBF constraint.
//!
//! Given `a = ḣ(x, t, u_d) + α(h)` and `b_raw = (∂h/∂x) g(x)`, the filter
//! returns `u = u_d + Λ(a, ‖b‖) W bᵀ` with `b = b_raw W`. The metric
//! `Γ = W⁻ᵀ W⁻¹` is never assembled.

use serde::{Deserialize, Serialize};

use crate::dual::{softplus, Scalar};
use crate::error::{require, Result};
use crate::linalg::{Mat3, Vec3};

/// Linear extended class-K function `α(h) = γ h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassKappaLinear {
    pub gamma: f64,
}

impl ClassKappaLinear {
    pub fn new(gamma: f64) -> Result<Self> {
        require(gamma > 0.0 && gamma.is_finite(), "gamma", "class-K gain must be positive")?;
        Ok(Self { gamma })
    }

    pub fn eval<T: Scalar>(&self, h: T) -> T {
        h * self.gamma
    }
}

/// Input weight factor W with `Γ = W⁻ᵀ W⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Mat3", into = "Mat3")]
pub struct WeightFactor(Mat3);

impl TryFrom<Mat3> for WeightFactor {
    type Error = crate::error::RtaError;
    fn try_from(m: Mat3) -> Result<Self> {
        WeightFactor::new(m)
    }
}

impl From<WeightFactor> for Mat3 {
    fn from(w: WeightFactor) -> Mat3 {
        w.0
    }
}

impl WeightFactor {
    /// Any finite nonsingular matrix; Γ is then positive definite.
    pub fn new(w: Mat3) -> Result<Self> {
        require(w.0.iter().flatten().all(|c| c.is_finite()), "W", "entries must be finite")?;
        let scale = w.0.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs()));
        require(scale > 0.0 && w.det().abs() > 1e-14 * scale.powi(3), "W", "must be nonsingular")?;
        Ok(Self(w))
    }

    pub fn diag(d: [f64; 3]) -> Result<Self> {
        Self::new(Mat3::diag(d))
    }

    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// Assembled metric `W⁻ᵀ W⁻¹`, for diagnostics and test oracles.
    pub fn gamma_metric(&self) -> Mat3 {
        let inv = self.0.to_na().try_inverse().expect("validated nonsingular");
        let g = inv.transpose() * inv;
        Mat3([0, 1, 2].map(|i| [0, 1, 2].map(|j| g[(i, j)])))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum FilterMode {
    Hard,
    Smooth { nu: f64 },
}

impl FilterMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FilterMode::Hard => Ok(()),
            FilterMode::Smooth { nu } => require(nu > 0.0 && nu.is_finite(), "nu", "smoothing must be positive"),
        }
    }

    pub fn lambda<T: Scalar>(&self, a: T, b_norm: T) -> T {
        match *self {
            FilterMode::Hard => lambda_hard(a, b_norm),
            FilterMode::Smooth { nu } => lambda_smooth(a, b_norm, nu),
        }
    }
}

/// `max(0, −a/‖b‖)/‖b‖`, zero when `‖b‖ = 0`.
pub fn lambda_hard<T: Scalar>(a: T, b_norm: T) -> T {
    if b_norm.value() == 0.0 || a.value() >= 0.0 {
        return T::zero();
    }
    -a / (b_norm * b_norm)
}

/// `ln(1 + e^{−ν a/‖b‖})/(ν ‖b‖)`, zero when `‖b‖ = 0`.
pub fn lambda_smooth<T: Scalar>(a: T, b_norm: T, nu: f64) -> T {
    if b_norm.value() == 0.0 {
        return T::zero();
    }
    softplus(-a * nu / b_norm) / (b_norm * nu)
}

#[derive(Debug, Clone, Copy)]
pub struct FilterOutput<T = f64> {
    pub u: Vec3<T>,
    pub lambda: T,
    /// Weighted constraint row `b_raw W`.
    pub b: Vec3<T>,
    /// Output differs from the desired input.
    pub active: bool,
    /// `b = 0` with `a < 0`: no input can restore the condition.
    pub infeasible: bool,
}

pub fn apply_filter<T: Scalar>(u_d: &Vec3<T>, a: T, b_raw: &Vec3<T>, w: &Mat3<T>, mode: FilterMode) -> FilterOutput<T> {
    let b = w.left_mul(b_raw);
    let b_norm = b.norm();
    if b_norm.value() == 0.0 {
        return FilterOutput { u: *u_d, lambda: T::zero(), b, active: false, infeasible: a.value() < 0.0 };
    }
    let lambda = mode.lambda(a, b_norm);
    let shift = w.mul_vec(&b).scale(lambda);
    let u = *u_d + shift;
    let active = u.value() != u_d.value();
    FilterOutput { u, lambda, b, active, infeasible: false }
}
