//! The ten acceptance criteria, each returning a verdict and a one-line detail.

use std::time::Instant;

use aircraft_rta::aircraft_model::velocity;
use aircraft_rta::backstepping_rta::{h_b, safe_accel, BacksteppingParams};
use aircraft_rta::constraints::softmin;
use aircraft_rta::dual::Dual;
use aircraft_rta::linalg::Vec3;
use aircraft_rta::modelfree_rta::{safe_velocity, ModelFreeParams};
use aircraft_rta::safety_filter::{apply_filter, FilterMode};
use aircraft_rta::sim::export::{csv_string, header};
use aircraft_rta::sim::{check, integrate, ControlUpdate, RtaConfig, Scenario, TrajectoryLog};
use aircraft_rta::tracking_controller::{
    clf_v, desired_velocity, roll_rate_closed_form, GoalCommand, SafeVelocityCommand, TrackingParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub struct Verdict {
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail }
    }
}

const TOL_H: f64 = -1e-3;

fn timed_check(name: &str) -> (Scenario, TrajectoryLog, aircraft_rta::sim::Metrics, f64) {
    let sc = scenario(name);
    let start = Instant::now();
    let (log, m, _) = check(&sc);
    (sc, log, m, start.elapsed().as_secs_f64())
}

pub fn c1_extended_intruder() -> Verdict {
    let (_, log, m, secs) = timed_check("extended_intruder");
    let ok = log.abort.is_none() && m.min_h_p >= TOL_H && m.min_h_mode >= TOL_H && m.roll_bit_exact;
    Verdict::new(
        ok,
        format!(
            "min h_p = {:.3}, min h_e = {:.3}, P == P_d bit-exact: {}, aborted: {} ({secs:.2} s)",
            m.min_h_p,
            m.min_h_mode,
            m.roll_bit_exact,
            log.abort.is_some()
        ),
    )
}

pub fn c2_extended_geofence() -> Verdict {
    let (_, log, m, secs) = timed_check("extended_geofence");
    // the only acceptable early end is the speed floor
    let clean_end = log.abort.as_ref().is_none_or(|a| a.reason.contains("speed"));
    let ok = clean_end && m.min_h_p >= TOL_H && m.min_speed < 20.0;
    let end = match &log.abort {
        Some(a) => format!("ended at t = {}: {}", a.t, a.reason),
        None => format!("reached t = {}", m.final_time),
    };
    Verdict::new(ok, format!("min h_p = {:.3}, min V_T = {:.3} m/s, {end} ({secs:.2} s)", m.min_h_p, m.min_speed))
}

pub fn c3_backstepping_combined() -> Verdict {
    let (_, log, m, secs) = timed_check("backstepping_combined");
    let worst = m.min_h_members.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = log.abort.is_none()
        && worst >= TOL_H
        && m.min_h_mode >= TOL_H
        && m.max_roll_deviation > 1e-6
        && m.infeasible_steps == 0
        && log.warnings.is_empty();
    Verdict::new(
        ok,
        format!(
            "min h_i = [{}], min h_b = {:.3}, max |P - P_d| = {:.3e}, infeasible steps = {}, warnings = {} ({secs:.2} s)",
            m.min_h_members.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(", "),
            m.min_h_mode,
            m.max_roll_deviation,
            m.infeasible_steps,
            log.warnings.len()
        ),
    )
}

/// Peak over the run of `max_i |u_i| / W_ii` with the reference input weights.
fn weighted_peak(m: &aircraft_rta::sim::Metrics) -> f64 {
    let w = [6.0, 0.6, 0.1];
    (0..3).map(|i| m.max_abs_inputs[i] / w[i]).fold(0.0, f64::max)
}

/// `max |v_s.d|` over planar positions with planar desired velocities.
fn planar_vs_leak(params: &ModelFreeParams) -> f64 {
    let set = combined_set();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let r = Vec3([rng.gen_range(-2000.0..2000.0), rng.gen_range(0.0..12000.0), 0.0]);
        let v_d = Vec3([rng.gen_range(-200.0..200.0), rng.gen_range(-200.0..200.0), 0.0]);
        let t = rng.gen_range(0.0..60.0);
        if let Ok(s) = safe_velocity(&r, t, &v_d, &set, params) {
            worst = worst.max(s.v_s[2].abs());
        }
    }
    worst
}

pub fn c4_modelfree_combined() -> Verdict {
    let (sc, log, m, secs) = timed_check("modelfree_combined");
    let RtaConfig::ModelFree(params) = &sc.rta else { panic!("model-free scenario expected") };
    let h_v0 = log.records[0].eval.h_mode;
    let (_, _, m_bs, _) = timed_check("backstepping_combined");
    let ratio = weighted_peak(&m) / weighted_peak(&m_bs);
    let leak = planar_vs_leak(params);
    let checks = [
        ("h_p", m.min_h_p >= TOL_H),
        ("h_V", h_v0 >= 0.0 && m.min_h_mode >= TOL_H),
        ("|d|", m.max_abs_down <= 1e-6),
        ("ratio", ratio >= 1.0),
        ("run", log.abort.is_none()),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Verdict::new(
        failed.is_empty(),
        format!(
            "min h_p = {:.3}, h_V(0) = {h_v0:.3}, min h_V = {:.3}, max |d| = {:.3e} (v_s down-leak on planar inputs {leak:.1e}), \
             input ratio vs backstepping = {ratio:.3} (peaks {:?} vs {:?}){} ({secs:.2} s)",
            m.min_h_p,
            m.min_h_mode,
            m.max_abs_down,
            m.max_abs_inputs.map(|v| (v * 1e3).round() / 1e3),
            m_bs.max_abs_inputs.map(|v| (v * 1e3).round() / 1e3),
            if failed.is_empty() { String::new() } else { format!(", failing: {}", failed.join(", ")) }
        ),
    )
}

pub fn c5_filter_oracles() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_qp: f64 = 0.0;
    for _ in 0..10_000 {
        let w = random_weight(&mut rng);
        let u_d = random_vec(&mut rng, 10.0);
        let a = rng.gen_range(-10.0..10.0);
        let b_raw = loop {
            let b = random_vec(&mut rng, 5.0);
            if b.norm() > 0.1 {
                break b;
            }
        };
        let got = apply_filter(&u_d, a, &b_raw, &w, FilterMode::Hard).u;
        let want = qp_oracle(&u_d, a, &b_raw, &w);
        worst_qp = worst_qp.max((got - want).max_abs());
    }
    let mut worst_roll: f64 = 0.0;
    for k in 0..10_000 {
        let a_p: f64 = rng.gen_range(-10.0..10.0);
        let b_p = if k % 10 == 0 { 0.0 } else { rng.gen_range(-10.0..10.0) };
        // b_P = 0 only arises with a_P ≤ 0 in the controller
        let a_p = if b_p == 0.0 { -a_p.abs() } else { a_p };
        worst_roll = worst_roll.max((roll_rate_closed_form(a_p, b_p) - roll_oracle(a_p, b_p)).abs());
    }
    Verdict::new(
        worst_qp <= 1e-9 && worst_roll <= 1e-12,
        format!("hard filter vs KKT oracle max abs err = {worst_qp:.2e}; roll rate vs 1-D oracle max abs err = {worst_roll:.2e}"),
    )
}

pub fn c6_softmin_bounds() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let mut tightest: f64 = f64::INFINITY;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=20);
        let kappa = 10f64.powf(rng.gen_range(-3.0..1.0));
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-1e4..1e4)).collect();
        let s = softmin(&vals, kappa);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let lower = min - (n as f64).ln() / kappa;
        if s > min + 1e-12 || s < lower - 1e-12 {
            violations += 1;
        }
        tightest = tightest.min((min - s).min(s - lower));
    }
    Verdict::new(violations == 0, format!("{violations} violations in 10000 lists, smallest slack {tightest:.2e}"))
}

type Activation<'a> = dyn Fn(&Point) -> Option<f64> + 'a;

/// The map being differentiated and the activation quantity used to find
/// near-activation states.
struct GradTarget<'a> {
    name: &'a str,
    f: Box<DualMap<'a>>,
    activation: Box<Activation<'a>>,
}

fn stratified_points(target: &GradTarget, pool: &[Point], rng: &mut ChaCha8Rng) -> Vec<(Point, &'static str)> {
    let valid = |p: &Point| eval_point(&*target.f, p).is_some();
    let mut pts = Vec::new();
    while pts.len() < 40 {
        let p = random_point(rng);
        if valid(&p) {
            pts.push((p, "random"));
        }
    }
    let mut k = 0;
    while pts.len() < 70 {
        let p = pool[(k * 37) % pool.len()];
        k += 1;
        if valid(&p) {
            pts.push((p, "trajectory"));
        }
    }
    let mut tries = 0;
    while pts.len() < 100 && tries < 20_000 {
        tries += 1;
        let a = pool[rng.gen_range(0..pool.len())];
        let b = if rng.gen_bool(0.5) { pool[rng.gen_range(0..pool.len())] } else { random_point(rng) };
        if let Some(p) = bisect_activation(a, b, &*target.activation, 0.1) {
            if valid(&p) {
                pts.push((p, "near-activation"));
            }
        }
    }
    pts
}

fn eval_point(f: &DualMap, p: &Point) -> Option<Vec<Dual>> {
    let d: Vec<Dual> = p.iter().map(|&v| Dual::constant(v)).collect();
    f(&d)
}

fn trajectory_pool() -> Vec<Point> {
    let mut pool = Vec::new();
    for name in ["backstepping_combined", "modelfree_combined", "extended_intruder"] {
        let log = integrate(&scenario(name));
        pool.extend(log.records.iter().step_by(20).map(|r| point(&r.x, r.t)));
    }
    pool
}

pub fn c7_gradients() -> Verdict {
    let set = combined_set();
    let md = model();
    let bs = BacksteppingParams::reference();
    let mf = ModelFreeParams::reference();
    let tp = TrackingParams::reference();
    let goal = scenario("modelfree_combined").goal;
    let gc = GoalCommand { goal: &goal, params: &tp };
    let sc_cmd = SafeVelocityCommand { goal: gc, set: &set, params: &mf };

    let a_v = |p: &Point| {
        let (x, t) = state_of(p);
        let v_d = desired_velocity(&x.position(), t, &goal, &tp);
        safe_velocity(&x.position(), t, &v_d, &set, &mf).ok().map(|s| s.a_v)
    };
    let a_e = |p: &Point| {
        let (x, t) = state_of(p);
        safe_accel(&x, t, &set, &bs, &md).ok().map(|s| s.a_e)
    };

    let targets: Vec<GradTarget> = vec![
        GradTarget {
            name: "h_p",
            f: Box::new(|p| {
                let (x, t) = state_of(p);
                Some(vec![set.compose_h_p(&x.position(), t).ok()?.value])
            }),
            activation: Box::new(a_v),
        },
        GradTarget {
            name: "h_e",
            f: Box::new(|p| {
                let (x, t) = state_of(p);
                md.check(&x).ok()?;
                Some(vec![set.compose_h_e(&x.position(), &velocity(&x), t, bs.gamma_p).ok()?.value])
            }),
            activation: Box::new(a_e),
        },
        GradTarget {
            name: "h_b",
            f: Box::new(|p| {
                let (x, t) = state_of(p);
                Some(vec![h_b(&x, t, &set, &bs, &md).ok()?.h_b])
            }),
            activation: Box::new(a_e),
        },
        GradTarget {
            name: "v_s",
            f: Box::new(|p| {
                let (x, t) = state_of(p);
                let r = x.position();
                let v_d = desired_velocity(&r, t, &goal, &tp);
                Some(safe_velocity(&r, t, &v_d, &set, &mf).ok()?.v_s.0.to_vec())
            }),
            activation: Box::new(a_v),
        },
        GradTarget {
            name: "V",
            f: Box::new(|p| {
                let (x, t) = state_of(p);
                Some(vec![clf_v(&x, t, &sc_cmd, &tp, &md).ok()?])
            }),
            activation: Box::new(a_v),
        },
    ];

    let pool = trajectory_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut parts = Vec::new();
    let mut ok = true;
    for target in &targets {
        let pts = stratified_points(target, &pool, &mut rng);
        let near = pts.iter().filter(|p| p.1 == "near-activation").count();
        let mut worst: f64 = 0.0;
        let mut failed_eval = 0;
        for (p, _) in &pts {
            match jacobian_rel_err(&*target.f, p, &POINT_STEPS) {
                Some(e) => worst = worst.max(e),
                None => failed_eval += 1,
            }
        }
        let pass = pts.len() == 100 && worst <= 1e-5 && failed_eval == 0;
        ok &= pass;
        parts.push(format!("{} {:.1e} ({} pts, {near} near-activation)", target.name, worst, pts.len()));
    }
    Verdict::new(ok, format!("max rel err: {}", parts.join("; ")))
}

/// `max_k ((V_{k+1} − V_k)/dt + λ V_k) / max(1, V_k)` and the envelope ratio
/// `max_k V_k / (1.05 V_0 e^{−0.9 λ t_k})`.
fn clf_residuals(sc: &Scenario) -> (f64, f64) {
    let log = integrate(sc);
    let lam = sc.tracking.lambda;
    let v0 = log.records[0].eval.lyapunov;
    let mut rate: f64 = f64::NEG_INFINITY;
    for w in log.records.windows(2) {
        let (a, b) = (w[0].eval.lyapunov, w[1].eval.lyapunov);
        rate = rate.max(((b - a) / sc.dt + lam * a) / a.max(1.0));
    }
    let env = log.records.iter().map(|r| r.eval.lyapunov / (1.05 * v0 * (-0.9 * lam * r.t).exp())).fold(0.0, f64::max);
    (rate, env)
}

pub fn c8_tracking_stability() -> Verdict {
    let sc = scenario("tracking_step");
    let (rate, env) = clf_residuals(&sc);
    let mut zoh = sc.clone();
    zoh.control_update = ControlUpdate::ZeroOrderHold;
    let (zoh_rate, _) = clf_residuals(&zoh);
    Verdict::new(
        rate <= 1e-3 && env <= 1.0,
        format!(
            "max (dV/dt + lambda V)/max(1,V) = {rate:.3e}, max V/(1.05 V0 e^(-0.9 lambda t)) = {env:.3} \
             (per-stage control; zero-order hold gives {zoh_rate:.3e})"
        ),
    )
}

pub fn observed_order(sc: &Scenario) -> (f64, f64, f64) {
    let finals: Vec<[f64; 7]> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| {
            let mut s = sc.clone();
            s.dt = dt;
            integrate(&s).records.last().unwrap().x.to_array()
        })
        .collect();
    let dist = |a: &[f64; 7], b: &[f64; 7]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let (e1, e2) = (dist(&finals[0], &finals[1]), dist(&finals[1], &finals[2]));
    ((e1 / e2).log2(), e1, e2)
}

pub fn c9_integrator_order() -> Verdict {
    let (order, e1, e2) = observed_order(&scenario("smooth_segment"));
    Verdict::new(order >= 3.5, format!("observed order {order:.3} (successive differences {e1:.3e}, {e2:.3e})"))
}

pub const DOCUMENTED_HEADER: &str =
    "t,n,e,d,phi,theta,psi,V_T,A_T_d,P_d,Q_d,A_T,P,Q,h_p,h_1,h_2,h_3,h_mode,intervening";

pub fn c10_determinism_and_format() -> Verdict {
    let sc = scenario("backstepping_combined");
    let a = csv_string(&integrate(&sc));
    let b = csv_string(&integrate(&sc));
    let first = a.lines().next().unwrap_or_default();
    let identical = a.as_bytes() == b.as_bytes();
    let header_ok = first == DOCUMENTED_HEADER && header(3).join(",") == DOCUMENTED_HEADER;
    Verdict::new(
        identical && header_ok,
        format!(
            "byte-identical CSV across runs: {identical} ({} bytes); header matches contract: {header_ok}",
            a.len()
        ),
    )
}

pub type Criterion = (&'static str, fn() -> Verdict);

pub fn all() -> Vec<Criterion> {
    vec![
        ("1 extended barrier, intruder", c1_extended_intruder as fn() -> Verdict),
        ("2 extended barrier, geofence braking", c2_extended_geofence),
        ("3 backstepping, combined constraints", c3_backstepping_combined),
        ("4 model-free, combined constraints", c4_modelfree_combined),
        ("5 filter closed forms vs oracles", c5_filter_oracles),
        ("6 softmin bounds", c6_softmin_bounds),
        ("7 gradient certification", c7_gradients),
        ("8 tracking exponential stability", c8_tracking_stability),
        ("9 integrator order", c9_integrator_order),
        ("10 determinism and CSV format", c10_determinism_and_format),
    ]
}
