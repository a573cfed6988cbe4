//! Shared oracles and samplers for the integration tests.
#![allow(dead_code)]

pub mod criteria;

use std::path::PathBuf;

use aircraft_rta::aircraft_model::{AircraftModel, AircraftState};
use aircraft_rta::constraints::{Constraint, ConstraintSet, GeofencePlane, MovingObstacle, ObstacleTrajectory};
use aircraft_rta::dual::Dual;
use aircraft_rta::linalg::{Mat3, Vec3};
use aircraft_rta::sim::Scenario;
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::Rng;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

pub fn scenario(name: &str) -> Scenario {
    Scenario::load(scenario_path(name)).expect("bundled scenario loads")
}

pub fn intruder() -> MovingObstacle {
    let tr = ObstacleTrajectory::constant_velocity(Vec3([-3048.0, 0.0, 0.0]), Vec3([121.92, 161.32, 0.0]));
    MovingObstacle::new(tr, 30.0).unwrap()
}

pub fn combined_set() -> ConstraintSet {
    let p2 = GeofencePlane::new(Vec3([0.0, 11901.0, 0.0]), Vec3([-4.0, -1.0, 0.0]), 15.0).unwrap();
    let p3 = GeofencePlane::new(Vec3([0.0, 11901.0, 0.0]), Vec3([-2.0, -1.0, 0.0]), 15.0).unwrap();
    ConstraintSet::new(
        0.007,
        vec![Constraint::Obstacle(intruder()), Constraint::Geofence(p2), Constraint::Geofence(p3)],
    )
    .unwrap()
}

/// Minimiser of `(u − u_d)ᵀ Γ (u − u_d)` subject to `a + b (u − u_d) ≥ 0`,
/// with `Γ = W⁻ᵀ W⁻¹`, solved from the KKT system of the active constraint.
pub fn qp_oracle(u_d: &Vec3, a: f64, b_raw: &Vec3, w: &Mat3) -> Vec3 {
    if a >= 0.0 {
        return *u_d;
    }
    let w_inv = w.to_na().try_inverse().expect("nonsingular W");
    let gamma: Matrix3<f64> = w_inv.transpose() * w_inv;
    let b = Vector3::new(b_raw[0], b_raw[1], b_raw[2]);
    // stationarity Γδ − μ bᵀ = 0, activity b·δ = −a
    let mut k = Matrix4::zeros();
    k.fixed_view_mut::<3, 3>(0, 0).copy_from(&gamma);
    for i in 0..3 {
        k[(i, 3)] = -b[i];
        k[(3, i)] = b[i];
    }
    let rhs = Vector4::new(0.0, 0.0, 0.0, -a);
    let sol = k.lu().solve(&rhs).expect("KKT system solvable");
    Vec3([u_d[0] + sol[0], u_d[1] + sol[1], u_d[2] + sol[2]])
}

/// Smallest-magnitude `P` with `a_P + b_P P ≤ 0`, chosen by direct comparison of
/// the two candidates (no roll, or exactly on the constraint boundary).
pub fn roll_oracle(a_p: f64, b_p: f64) -> f64 {
    let mut best: Option<f64> = None;
    let mut candidates = vec![0.0];
    if b_p != 0.0 {
        candidates.push(-a_p / b_p);
    }
    for p in candidates {
        let feasible = a_p + b_p * p <= 1e-12 * a_p.abs().max(1.0);
        if feasible && best.is_none_or(|q: f64| p.abs() < q.abs()) {
            best = Some(p);
        }
    }
    best.unwrap_or(0.0)
}

/// Random weight factor with singular values bounded in [0.2, 5].
pub fn random_weight<R: Rng>(rng: &mut R) -> Mat3 {
    let a = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let svd = a.svd(true, true);
    let s = Matrix3::from_diagonal(&Vector3::from_fn(|_, _| rng.gen_range(0.2..5.0)));
    let m = svd.u.unwrap() * s * svd.v_t.unwrap();
    Mat3(std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])))
}

pub fn random_vec<R: Rng>(rng: &mut R, scale: f64) -> Vec3 {
    Vec3(std::array::from_fn(|_| rng.gen_range(-scale..scale)))
}

/// Flight state plus time, stored as `[n, e, d, φ, θ, ψ, V_T, t]`.
pub type Point = [f64; 8];

pub fn point(x: &AircraftState, t: f64) -> Point {
    let a = x.to_array();
    [a[0], a[1], a[2], a[3], a[4], a[5], a[6], t]
}

pub fn state_of<T: aircraft_rta::dual::Scalar>(p: &[T]) -> (AircraftState<T>, T) {
    (AircraftState::from_array(std::array::from_fn(|i| p[i])), p[7])
}

/// Uniform draw over the airspace around the combined scenario.
pub fn random_point<R: Rng>(rng: &mut R) -> Point {
    [
        rng.gen_range(-2000.0..2000.0),
        rng.gen_range(0.0..12000.0),
        rng.gen_range(-500.0..500.0),
        rng.gen_range(-0.8..0.8),
        rng.gen_range(-0.4..0.4),
        rng.gen_range(0.0..std::f64::consts::TAU),
        rng.gen_range(80.0..250.0),
        rng.gen_range(0.0..60.0),
    ]
}

/// Bisects the segment between two points on opposite sides of `g = 0` until
/// `|g| < tol`. Returns `None` if the endpoints do not bracket a sign change.
pub fn bisect_activation(mut lo: Point, mut hi: Point, g: &dyn Fn(&Point) -> Option<f64>, tol: f64) -> Option<Point> {
    let (mut glo, ghi) = (g(&lo)?, g(&hi)?);
    if glo.signum() == ghi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid: Point = std::array::from_fn(|i| 0.5 * (lo[i] + hi[i]));
        let gm = g(&mid)?;
        if gm.abs() < tol {
            return Some(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    None
}

/// A scalar- or vector-valued map evaluated on dual numbers; `None` marks a
/// point outside the domain.
pub type DualMap<'a> = dyn Fn(&[Dual]) -> Option<Vec<Dual>> + 'a;

fn eval_re(f: &DualMap, p: &[f64]) -> Option<Vec<f64>> {
    let d: Vec<Dual> = p.iter().map(|&v| Dual::constant(v)).collect();
    Some(f(&d)?.iter().map(|o| o.re).collect())
}

/// Largest relative gap between the forward-mode Jacobian of `f` at `p` and a
/// fourth-order central difference, per output, measured against the largest
/// Jacobian entry of that output. `steps[i]` is the difference step for input i.
pub fn jacobian_rel_err(f: &DualMap, p: &[f64], steps: &[f64]) -> Option<f64> {
    let n = p.len();
    let m = eval_re(f, p)?.len();
    let mut ad = vec![vec![0.0; n]; m];
    let mut fd = vec![vec![0.0; n]; m];
    for i in 0..n {
        let d: Vec<Dual> = p.iter().enumerate().map(|(j, &v)| Dual::new(v, if i == j { 1.0 } else { 0.0 })).collect();
        for (k, o) in f(&d)?.iter().enumerate() {
            ad[k][i] = o.eps;
        }
        let h = steps[i];
        let at = |s: f64| {
            let mut q = p.to_vec();
            q[i] += s * h;
            eval_re(f, &q)
        };
        let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
        for k in 0..m {
            fd[k][i] = (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h);
        }
    }
    let mut worst: f64 = 0.0;
    for k in 0..m {
        let scale = ad[k].iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if scale == 0.0 {
            continue;
        }
        for i in 0..n {
            worst = worst.max((ad[k][i] - fd[k][i]).abs() / scale);
        }
    }
    Some(worst)
}

/// Step sizes for `[n, e, d, φ, θ, ψ, V_T, t]`.
pub const POINT_STEPS: [f64; 8] = [1e-2, 1e-2, 1e-2, 1e-5, 1e-5, 1e-5, 1e-3, 1e-4];

pub fn model() -> AircraftModel {
    AircraftModel::default()
}
