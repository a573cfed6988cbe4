use serde::Serialize;

use super::integrate::TrajectoryLog;
use super::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub scenario: String,
    pub strategy: String,
    pub steps: usize,
    pub final_time: f64,
    pub abort_reason: Option<String>,
    pub min_h_p: f64,
    pub min_h_members: Vec<f64>,
    pub min_h_mode: f64,
    pub min_h_e: Option<f64>,
    /// Total time (s) during which u ≠ u_d.
    pub intervention_duration: f64,
    /// Peak |A_T|, |P|, |Q|.
    pub max_abs_inputs: [f64; 3],
    pub max_roll_deviation: f64,
    pub roll_bit_exact: bool,
    pub min_speed: f64,
    pub max_abs_down: f64,
    pub final_position_error: f64,
    pub infeasible_steps: usize,
    pub final_lyapunov: f64,
}

fn min_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::INFINITY, f64::min)
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

pub fn compute(sc: &Scenario, log: &TrajectoryLog) -> Metrics {
    let recs = &log.records;
    let n = log.constraint_count;
    let min_h_members = (0..n).map(|i| min_of(recs.iter().map(|r| r.eval.h_members[i]))).collect();
    let min_h_e = if recs.iter().all(|r| r.eval.h_e.is_some()) && !recs.is_empty() {
        Some(min_of(recs.iter().filter_map(|r| r.eval.h_e)))
    } else {
        None
    };
    let last = recs.last();
    let final_position_error = last.map(|r| (r.x.position() - sc.goal.sample(r.t).0).norm()).unwrap_or(f64::NAN);
    Metrics {
        scenario: sc.name.clone(),
        strategy: sc.rta.name().to_string(),
        steps: recs.len(),
        final_time: last.map_or(0.0, |r| r.t),
        abort_reason: log.abort.as_ref().map(|a| format!("t = {}: {}", a.t, a.reason)),
        min_h_p: min_of(recs.iter().map(|r| r.eval.h_p)),
        min_h_members,
        min_h_mode: min_of(recs.iter().map(|r| r.eval.h_mode)),
        min_h_e,
        intervention_duration: recs.iter().filter(|r| r.eval.intervening).count() as f64 * log.dt,
        max_abs_inputs: [
            max_of(recs.iter().map(|r| r.eval.u.a_t.abs())),
            max_of(recs.iter().map(|r| r.eval.u.p.abs())),
            max_of(recs.iter().map(|r| r.eval.u.q.abs())),
        ],
        max_roll_deviation: max_of(recs.iter().map(|r| (r.eval.u.p - r.eval.u_d.p).abs())),
        roll_bit_exact: recs.iter().all(|r| r.eval.u.p.to_bits() == r.eval.u_d.p.to_bits()),
        min_speed: min_of(recs.iter().map(|r| r.x.v_t)),
        max_abs_down: max_of(recs.iter().map(|r| r.x.d.abs())),
        final_position_error,
        infeasible_steps: recs.iter().filter(|r| r.eval.infeasible).count(),
        final_lyapunov: last.map_or(f64::NAN, |r| r.eval.lyapunov),
    }
}
