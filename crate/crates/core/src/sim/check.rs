use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::integrate::{integrate, TrajectoryLog};
use super::metrics::{compute, Metrics};
use super::scenario::Scenario;
use super::SimError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub scenario: String,
    pub items: Vec<CheckItem>,
    /// The run ended early and the scenario does not allow it.
    pub unexpected_abort: bool,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        !self.unexpected_abort && self.items.iter().all(|i| i.passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.items {
            writeln!(f, "[{}] {}: {}", if i.passed { "PASS" } else { "FAIL" }, i.name, i.detail)?;
        }
        write!(f, "{}: {}", self.scenario, if self.passed() { "all checks passed" } else { "violations found" })
    }
}

fn item(items: &mut Vec<CheckItem>, name: &str, passed: bool, detail: String) {
    items.push(CheckItem { name: name.to_string(), passed, detail });
}

/// Evaluates the scenario's acceptance block against a finished run.
pub fn evaluate_acceptance(sc: &Scenario, log: &TrajectoryLog, m: &Metrics) -> CheckReport {
    let acc = &sc.acceptance;
    let mut items = Vec::new();
    let abort = log.abort.as_ref();
    let unexpected_abort = abort.is_some() && !acc.allow_abort;
    item(
        &mut items,
        "completion",
        !unexpected_abort,
        match abort {
            None => format!("reached t = {}", m.final_time),
            Some(a) if acc.allow_abort => format!("permitted abort at t = {}: {}", a.t, a.reason),
            Some(a) => format!("aborted at t = {}: {}", a.t, a.reason),
        },
    );
    if let Some(lo) = acc.min_h_p {
        item(&mut items, "min h_p", m.min_h_p >= lo, format!("{:.6e} >= {lo:e}", m.min_h_p));
    }
    if let Some(lo) = acc.min_h_members {
        let worst = m.min_h_members.iter().copied().fold(f64::INFINITY, f64::min);
        item(&mut items, "min h_i", worst >= lo, format!("{:?} >= {lo:e}", m.min_h_members));
    }
    if let Some(lo) = acc.min_h_mode {
        let name = format!("min {}", sc.rta.barrier_name());
        item(&mut items, &name, m.min_h_mode >= lo, format!("{:.6e} >= {lo:e}", m.min_h_mode));
    }
    if acc.roll_transparent {
        item(&mut items, "P = P_d bit-exact", m.roll_bit_exact, format!("max |P - P_d| = {:e}", m.max_roll_deviation));
    }
    if let Some(th) = acc.roll_engaged {
        item(
            &mut items,
            "roll channel engaged",
            m.max_roll_deviation > th,
            format!("max |P - P_d| = {:e} > {th:e}", m.max_roll_deviation),
        );
    }
    if acc.forbid_infeasible {
        item(
            &mut items,
            "no infeasible steps",
            m.infeasible_steps == 0,
            format!("{} infeasible steps", m.infeasible_steps),
        );
    }
    if let Some(v) = acc.speed_below {
        item(&mut items, "speed drops", m.min_speed < v, format!("min V_T = {:.4} < {v}", m.min_speed));
    }
    if let Some(d) = acc.max_abs_down {
        item(&mut items, "|d| bound", m.max_abs_down <= d, format!("max |d| = {:e} <= {d:e}", m.max_abs_down));
    }
    CheckReport { scenario: sc.name.clone(), items, unexpected_abort }
}

/// Runs the scenario and evaluates its acceptance block.
pub fn check(sc: &Scenario) -> (TrajectoryLog, Metrics, CheckReport) {
    let log = integrate(sc);
    let m = compute(sc, &log);
    let report = evaluate_acceptance(sc, &log, &m);
    (log, m, report)
}

/// Copy of the scenario with a dotted JSON path (e.g. `rta.gamma_p`,
/// `tracking.k_v.0.0`) set to `value`, revalidated.
pub fn with_parameter(sc: &Scenario, path: &str, value: f64) -> Result<Scenario, SimError> {
    let mut root = serde_json::to_value(sc).expect("scenario serialises");
    let mut node = &mut root;
    for key in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(key),
            Value::Array(items) => key.parse::<usize>().ok().and_then(move |i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| SimError::UnknownParam(path.to_string()))?;
    }
    if !node.is_number() {
        return Err(SimError::UnknownParam(path.to_string()));
    }
    *node = serde_json::Number::from_f64(value).map(Value::Number).ok_or(SimError::UnknownParam(path.to_string()))?;
    Scenario::from_json(&root.to_string(), &format!("{} with {path} = {value}", sc.name))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    /// Present when the modified scenario itself was rejected.
    pub error: Option<String>,
    pub metrics: Option<Metrics>,
    pub passed: Option<bool>,
}

pub fn sweep_values(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![min],
        n => (0..n).map(|k| min + (max - min) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Independent runs over a parameter grid, executed in parallel.
pub fn sweep(sc: &Scenario, path: &str, values: &[f64]) -> Result<Vec<SweepRow>, SimError> {
    // surface an unknown path once instead of per row
    with_parameter(sc, path, values.first().copied().unwrap_or(0.0)).map(|_| ()).or_else(|e| match e {
        SimError::UnknownParam(_) => Err(e),
        _ => Ok(()),
    })?;
    Ok(values
        .par_iter()
        .map(|&value| match with_parameter(sc, path, value) {
            Ok(s) => {
                let (_, m, r) = check(&s);
                SweepRow { value, error: None, passed: Some(r.passed()), metrics: Some(m) }
            }
            Err(e) => SweepRow { value, error: Some(e.to_string()), metrics: None, passed: None },
        })
        .collect())
}

pub fn sweep_table(path: &str, rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        path,
        "min_h_p",
        "min_h_mode",
        "intervention_duration",
        "max_abs_A_T",
        "max_abs_P",
        "max_abs_Q",
        "final_position_error",
        "aborted",
        "passed",
        "error",
    ])
    .expect("memory write");
    for r in rows {
        let mut rec = vec![r.value.to_string()];
        match &r.metrics {
            Some(m) => rec.extend([
                m.min_h_p.to_string(),
                m.min_h_mode.to_string(),
                m.intervention_duration.to_string(),
                m.max_abs_inputs[0].to_string(),
                m.max_abs_inputs[1].to_string(),
                m.max_abs_inputs[2].to_string(),
                m.final_position_error.to_string(),
                m.abort_reason.is_some().to_string(),
            ]),
            None => rec.extend(std::iter::repeat_n(String::new(), 8)),
        }
        rec.push(r.passed.map(|p| p.to_string()).unwrap_or_default());
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec).expect("memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
