//! Position-based barrier candidates and their smooth composition.
//!
//! Each member is either a moving spherical obstacle (`‖r − r_i(t)‖ − ρ_i`)
//! or a planar geofence (`n_iᵀ(r − r_i) − ρ_i`). Members are merged with a
//! log-sum-exp soft minimum; its gradient is the softmin-weighted average of
//! member gradients. The same machinery composes the velocity-extended
//! barriers `h_i + ḣ_i/γ_p`.

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;
use crate::error::{require, Result, RtaError};
use crate::linalg::Vec3;

/// Below this separation (m) the collision normal is undefined.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// Quadratic-in-time obstacle path `c + v t + ½ a t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleTrajectory {
    pub origin: Vec3,
    pub velocity: Vec3,
    #[serde(default = "zero3")]
    pub acceleration: Vec3,
}

fn zero3() -> Vec3 {
    Vec3([0.0; 3])
}

/// Position, velocity and acceleration of an obstacle at one instant.
#[derive(Debug, Clone, Copy)]
pub struct ObstacleSample<T> {
    pub position: Vec3<T>,
    pub velocity: Vec3<T>,
    pub acceleration: Vec3<T>,
}

impl ObstacleTrajectory {
    pub fn constant_velocity(origin: Vec3, velocity: Vec3) -> Self {
        Self { origin, velocity, acceleration: zero3() }
    }

    pub fn sample<T: Scalar>(&self, t: T) -> ObstacleSample<T> {
        let c = Vec3::<T>::from_f64(self.origin);
        let v = Vec3::<T>::from_f64(self.velocity);
        let a = Vec3::<T>::from_f64(self.acceleration);
        ObstacleSample { position: c + v.scale(t) + a.scale(t * t * 0.5), velocity: v + a.scale(t), acceleration: a }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovingObstacle {
    pub trajectory: ObstacleTrajectory,
    /// Collision radius ρ_i (m).
    pub radius: f64,
}

impl MovingObstacle {
    pub fn new(trajectory: ObstacleTrajectory, radius: f64) -> Result<Self> {
        let o = Self { trajectory, radius };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        require(self.radius > 0.0 && self.radius.is_finite(), "radius", "must be positive")
    }
}

/// Planar keep-out boundary; safe side is along the unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlane")]
pub struct GeofencePlane {
    pub point: Vec3,
    pub normal: Vec3,
    pub margin: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlane {
    point: Vec3,
    normal: Vec3,
    margin: f64,
}

impl TryFrom<RawPlane> for GeofencePlane {
    type Error = RtaError;
    fn try_from(p: RawPlane) -> Result<Self> {
        GeofencePlane::new(p.point, p.normal, p.margin)
    }
}

impl GeofencePlane {
    /// The normal is rescaled to unit length. Normals already unit to within
    /// rounding are kept bit for bit so serialisation round-trips.
    pub fn new(point: Vec3, normal: Vec3, margin: f64) -> Result<Self> {
        let len = normal.norm();
        require(len > 0.0 && len.is_finite(), "normal", "must be a nonzero finite vector")?;
        require(margin >= 0.0 && margin.is_finite(), "margin", "must be nonnegative")?;
        let normal = if (len - 1.0).abs() <= 4.0 * f64::EPSILON { normal } else { normal.scale(1.0 / len) };
        Ok(Self { point, normal, margin })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Constraint {
    Obstacle(MovingObstacle),
    Geofence(GeofencePlane),
}

/// Value and first-order data of one barrier member at (r, v, t).
#[derive(Debug, Clone, Copy)]
pub struct MemberEval<T> {
    pub value: T,
    pub grad_r: Vec3<T>,
    pub grad_v: Vec3<T>,
    pub dt: T,
}

impl<T: Scalar> MemberEval<T> {
    /// Total derivative along ṙ = v with the velocity held fixed.
    pub fn rate(&self, v: &Vec3<T>) -> T {
        self.grad_r.dot(v) + self.dt
    }
}

fn collision_normal<T: Scalar>(r: &Vec3<T>, s: &ObstacleSample<T>) -> Result<(Vec3<T>, T)> {
    let rel = *r - s.position;
    let dist = rel.norm();
    if !(dist.value() >= COINCIDENCE_TOL) {
        return Err(RtaError::CoincidentPosition { distance: dist.value() });
    }
    Ok((rel.scale(dist.recip()), dist))
}

/// `‖r − r_i(t)‖ − ρ_i`.
pub fn h_collision<T: Scalar>(r: &Vec3<T>, t: T, obs: &MovingObstacle) -> Result<T> {
    let s = obs.trajectory.sample(t);
    let (_, dist) = collision_normal(r, &s)?;
    Ok(dist - obs.radius)
}

/// Unit normal from the obstacle to the aircraft.
pub fn grad_collision<T: Scalar>(r: &Vec3<T>, t: T, obs: &MovingObstacle) -> Result<Vec3<T>> {
    let s = obs.trajectory.sample(t);
    Ok(collision_normal(r, &s)?.0)
}

/// `n_iᵀ (v − v_i(t))`.
pub fn hdot_collision<T: Scalar>(r: &Vec3<T>, t: T, v: &Vec3<T>, obs: &MovingObstacle) -> Result<T> {
    let s = obs.trajectory.sample(t);
    let (n, _) = collision_normal(r, &s)?;
    Ok(n.dot(&(*v - s.velocity)))
}

pub fn h_geofence<T: Scalar>(r: &Vec3<T>, plane: &GeofencePlane) -> T {
    let n = Vec3::<T>::from_f64(plane.normal);
    n.dot(&(*r - Vec3::from_f64(plane.point))) - plane.margin
}

pub fn hdot_geofence<T: Scalar>(v: &Vec3<T>, plane: &GeofencePlane) -> T {
    Vec3::<T>::from_f64(plane.normal).dot(v)
}

impl Constraint {
    /// Position-only candidate h_{p,i}(r, t) with its r- and t-derivatives.
    pub fn position_barrier<T: Scalar>(&self, r: &Vec3<T>, t: T) -> Result<MemberEval<T>> {
        match self {
            Constraint::Obstacle(obs) => {
                let s = obs.trajectory.sample(t);
                let (n, dist) = collision_normal(r, &s)?;
                Ok(MemberEval { value: dist - obs.radius, dt: -n.dot(&s.velocity), grad_r: n, grad_v: Vec3::zero() })
            }
            Constraint::Geofence(p) => Ok(MemberEval {
                value: h_geofence(r, p),
                grad_r: Vec3::from_f64(p.normal),
                grad_v: Vec3::zero(),
                dt: T::zero(),
            }),
        }
    }

    /// Velocity-extended member `h_{p,i} + ḣ_{p,i}(r, t, v)/γ_p` with analytic
    /// partial derivatives in r, v and t.
    pub fn extended_barrier<T: Scalar>(&self, r: &Vec3<T>, v: &Vec3<T>, t: T, gamma_p: f64) -> Result<MemberEval<T>> {
        let k = 1.0 / gamma_p;
        match self {
            Constraint::Obstacle(obs) => {
                let s = obs.trajectory.sample(t);
                let (n, dist) = collision_normal(r, &s)?;
                let rel_v = *v - s.velocity;
                let closing = n.dot(&rel_v);
                // (I − n nᵀ)(v − v_i)/‖r − r_i‖ is ∂(nᵀ(v − v_i))/∂r
                let tangential = (rel_v - n.scale(closing)).scale(dist.recip());
                let grad_r = n + tangential.scale_f(k);
                let dt = -n.dot(&s.velocity) + (-tangential.dot(&s.velocity) - n.dot(&s.acceleration)) * k;
                Ok(MemberEval { value: dist - obs.radius + closing * k, grad_r, grad_v: n.scale_f(k), dt })
            }
            Constraint::Geofence(p) => {
                let n = Vec3::<T>::from_f64(p.normal);
                Ok(MemberEval {
                    value: h_geofence(r, p) + n.dot(v) * k,
                    grad_r: n,
                    grad_v: n.scale_f(k),
                    dt: T::zero(),
                })
            }
        }
    }
}

/// Ordered constraint list joined with AND logic, plus the softmin sharpness κ (1/m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSet {
    pub kappa: f64,
    pub members: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new(kappa: f64, members: Vec<Constraint>) -> Result<Self> {
        let s = Self { kappa, members };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        require(self.kappa > 0.0 && self.kappa.is_finite(), "kappa", "must be positive")?;
        require(!self.members.is_empty(), "members", "constraint set must not be empty")?;
        for m in &self.members {
            if let Constraint::Obstacle(o) = m {
                o.validate()?;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Composed position candidate h_p.
    pub fn compose_h_p<T: Scalar>(&self, r: &Vec3<T>, t: T) -> Result<BarrierEval<T>> {
        let members = self.members.iter().map(|c| c.position_barrier(r, t)).collect::<Result<Vec<_>>>()?;
        Ok(compose(&members, self.kappa))
    }

    /// Composed velocity-extended barrier h_e.
    pub fn compose_h_e<T: Scalar>(&self, r: &Vec3<T>, v: &Vec3<T>, t: T, gamma_p: f64) -> Result<BarrierEval<T>> {
        let members = self.members.iter().map(|c| c.extended_barrier(r, v, t, gamma_p)).collect::<Result<Vec<_>>>()?;
        Ok(compose(&members, self.kappa))
    }
}

/// Softmin-composed barrier with weight-averaged partial derivatives.
#[derive(Debug, Clone)]
pub struct BarrierEval<T = f64> {
    pub value: T,
    pub grad_r: Vec3<T>,
    pub grad_v: Vec3<T>,
    pub dt: T,
    pub per_constraint: Vec<T>,
    /// e^{−κ(h_i − h)}; nonnegative, sums to one.
    pub weights: Vec<T>,
}

impl<T: Scalar> BarrierEval<T> {
    /// ḣ along ṙ = v with zero velocity rate.
    pub fn rate(&self, v: &Vec3<T>) -> T {
        self.grad_r.dot(v) + self.dt
    }
}

/// Max-shift stabilised log-sum-exp soft minimum of member barriers.
pub fn compose<T: Scalar>(members: &[MemberEval<T>], kappa: f64) -> BarrierEval<T> {
    assert!(!members.is_empty(), "compose needs at least one member");
    let lo = members.iter().map(|m| m.value).min_by(|a, b| a.value().total_cmp(&b.value())).unwrap();
    let expo: Vec<T> = members.iter().map(|m| (-(m.value - lo) * kappa).exp()).collect();
    let mut sum = T::zero();
    for e in &expo {
        sum += *e;
    }
    let value = lo - sum.ln() / kappa;
    let weights: Vec<T> = expo.iter().map(|e| *e / sum).collect();

    let mut grad_r = Vec3::zero();
    let mut grad_v = Vec3::zero();
    let mut dt = T::zero();
    for (m, w) in members.iter().zip(&weights) {
        grad_r = grad_r + m.grad_r.scale(*w);
        grad_v = grad_v + m.grad_v.scale(*w);
        dt += m.dt * *w;
    }
    BarrierEval { value, grad_r, grad_v, dt, per_constraint: members.iter().map(|m| m.value).collect(), weights }
}

/// `−(1/κ) ln Σ e^{−κ h_i}`, never overflows for finite input.
pub fn softmin<T: Scalar>(values: &[T], kappa: f64) -> T {
    assert!(!values.is_empty(), "softmin of empty list");
    let lo = *values.iter().min_by(|a, b| a.value().total_cmp(&b.value())).unwrap();
    let mut sum = T::zero();
    for v in values {
        sum += (-(*v - lo) * kappa).exp();
    }
    lo - sum.ln() / kappa
}

/// `(1/κ) ln Σ e^{κ h_i}`.
pub fn softmax<T: Scalar>(values: &[T], kappa: f64) -> T {
    let neg: Vec<T> = values.iter().map(|v| -*v).collect();
    -softmin(&neg, kappa)
}
