use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::constraints::Constraint;
use crate::linalg::Vec3;

use super::integrate::{Record, TrajectoryLog};
use super::metrics::Metrics;
use super::scenario::Scenario;
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Column names in output order.
pub fn header(constraint_count: usize) -> Vec<String> {
    let mut cols: Vec<String> =
        ["t", "n", "e", "d", "phi", "theta", "psi", "V_T", "A_T_d", "P_d", "Q_d", "A_T", "P", "Q", "h_p"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    cols.extend((1..=constraint_count).map(|i| format!("h_{i}")));
    cols.push("h_mode".into());
    cols.push("intervening".into());
    cols
}

fn row(r: &Record) -> Vec<f64> {
    let x = r.x.wrapped();
    let e = &r.eval;
    let mut v = vec![r.t, x.n, x.e, x.d, x.phi, x.theta, x.psi, x.v_t];
    v.extend([e.u_d.a_t, e.u_d.p, e.u_d.q, e.u.a_t, e.u.p, e.u.q, e.h_p]);
    v.extend(&e.h_members);
    v.push(e.h_mode);
    v.push(if e.intervening { 1.0 } else { 0.0 });
    v
}

pub fn write_csv<W: Write>(log: &TrajectoryLog, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(log.constraint_count))?;
    for r in &log.records {
        let mut fields: Vec<String> = row(r).iter().map(|v| v.to_string()).collect();
        // flag column as an integer
        let last = fields.len() - 1;
        fields[last] = if r.eval.intervening { "1".into() } else { "0".into() };
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(log: &TrajectoryLog) -> String {
    let mut buf = Vec::new();
    write_csv(log, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn json_value(log: &TrajectoryLog, metrics: &Metrics) -> serde_json::Value {
    let rows: Vec<Vec<f64>> = log.records.iter().map(row).collect();
    json!({
        "scenario": log.scenario,
        "columns": header(log.constraint_count),
        "rows": rows,
        "metrics": metrics,
        "abort": log.abort,
        "warnings": log.warnings,
    })
}

/// Polylines are thinned to about this many vertices.
const MAX_POINTS: usize = 2000;

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Frame {
    fn new(x0: f64, y0: f64, w: f64, h: f64, pts: impl Iterator<Item = [f64; 2]>) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in pts.filter(|p| p[0].is_finite() && p[1].is_finite()) {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        for k in 0..2 {
            if !lo[k].is_finite() {
                lo[k] = 0.0;
                hi[k] = 1.0;
            }
            let pad = ((hi[k] - lo[k]) * 0.05).max(1e-9);
            lo[k] -= pad;
            hi[k] += pad;
        }
        Self { x0, y0, w, h, lo, hi }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let u = (p[0] - self.lo[0]) / (self.hi[0] - self.lo[0]);
        let v = (p[1] - self.lo[1]) / (self.hi[1] - self.lo[1]);
        (self.x0 + u * self.w, self.y0 + (1.0 - v) * self.h)
    }

    fn polyline(&self, svg: &mut String, pts: &[[f64; 2]], color: &str) {
        let mut d = String::new();
        let stride = (pts.len() / MAX_POINTS).max(1);
        for p in pts.iter().step_by(stride).filter(|p| p[1].is_finite()) {
            let (x, y) = self.map(*p);
            let _ = write!(d, "{x:.2},{y:.2} ");
        }
        let _ =
            writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, d.trim_end());
    }

    fn axes(&self, svg: &mut String, title: &str, xlabel: &str) {
        let _ = writeln!(
            svg,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
            self.x0, self.y0, self.w, self.h
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="13">{title}</text>"#, self.x0, self.y0 - 6.0);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="10">{xlabel}: [{:.4}, {:.4}], y: [{:.4}, {:.4}]</text>"#,
            self.x0,
            self.y0 + self.h + 14.0,
            self.lo[0],
            self.hi[0],
            self.lo[1],
            self.hi[1]
        );
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Ground track with constraints, barrier traces and input traces.
pub fn svg_string(sc: &Scenario, log: &TrajectoryLog) -> String {
    let mut svg = String::new();
    let _ =
        writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="1200" height="900" font-family="sans-serif">"#);
    let _ = writeln!(svg, r#"<rect width="1200" height="900" fill="white"/>"#);

    // ground track: east to the right, north up
    let track: Vec<[f64; 2]> = log.records.iter().map(|r| [r.x.e, r.x.n]).collect();
    let mut obstacle_paths = Vec::new();
    for c in &sc.constraints.members {
        if let Constraint::Obstacle(o) = c {
            let path: Vec<[f64; 2]> = log
                .records
                .iter()
                .map(|r| {
                    let p: Vec3 = o.trajectory.sample(r.t).position;
                    [p[1], p[0]]
                })
                .collect();
            obstacle_paths.push(path);
        }
    }
    let frame = Frame::new(60.0, 40.0, 1080.0, 380.0, track.iter().chain(obstacle_paths.iter().flatten()).copied());
    frame.axes(&mut svg, &format!("{}: ground track (north vs east)", sc.name), "east");
    for c in &sc.constraints.members {
        if let Constraint::Geofence(p) = c {
            // boundary line n·(r − r_i) = ρ, drawn across the frame
            let base = p.point + p.normal.scale(p.margin);
            let tangent = [-p.normal[0], p.normal[1]];
            let span = (frame.hi[0] - frame.lo[0]).max(frame.hi[1] - frame.lo[1]) * 4.0;
            let tn = (tangent[0].powi(2) + tangent[1].powi(2)).sqrt().max(1e-12);
            let seg: Vec<[f64; 2]> = (-200..=200)
                .map(|k| {
                    let s = span * k as f64 / 200.0 / tn;
                    [base[1] + s * tangent[0], base[0] + s * tangent[1]]
                })
                .filter(|q| q[0] >= frame.lo[0] && q[0] <= frame.hi[0] && q[1] >= frame.lo[1] && q[1] <= frame.hi[1])
                .collect();
            frame.polyline(&mut svg, &seg, "#444");
        }
    }
    for path in &obstacle_paths {
        frame.polyline(&mut svg, path, "#d62728");
    }
    frame.polyline(&mut svg, &track, "#1f77b4");

    // barriers
    let mut series: Vec<Vec<[f64; 2]>> = vec![log.records.iter().map(|r| [r.t, r.eval.h_p]).collect()];
    for i in 0..log.constraint_count {
        series.push(log.records.iter().map(|r| [r.t, r.eval.h_members[i]]).collect());
    }
    series.push(log.records.iter().map(|r| [r.t, r.eval.h_mode]).collect());
    let frame = Frame::new(60.0, 480.0, 510.0, 360.0, series.iter().flatten().copied());
    frame.axes(&mut svg, &format!("h_p, h_1..h_{}, {} (m)", log.constraint_count, sc.rta.barrier_name()), "t");
    for (k, s) in series.iter().enumerate() {
        frame.polyline(&mut svg, s, PALETTE[k % PALETTE.len()]);
    }

    // inputs, each channel scaled by its peak so all three are visible
    let chans: Vec<Vec<[f64; 2]>> = (0..3)
        .map(|j| {
            let vals: Vec<f64> = log.records.iter().map(|r| r.eval.u.to_vec()[j]).collect();
            let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
            log.records.iter().zip(&vals).map(|(r, v)| [r.t, v / peak]).collect()
        })
        .collect();
    let frame = Frame::new(630.0, 480.0, 510.0, 360.0, chans.iter().flatten().copied());
    frame.axes(&mut svg, "A_T, P, Q (normalised by peak)", "t");
    for (k, s) in chans.iter().enumerate() {
        frame.polyline(&mut svg, s, PALETTE[k]);
    }
    svg.push_str("</svg>\n");
    svg
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), SimError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| SimError::Write { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| SimError::Write { path: path.to_path_buf(), source })
}

/// Writes `<name>.<ext>` and `<name>.metrics.json` into `dir`; returns both paths.
pub fn export(
    sc: &Scenario,
    log: &TrajectoryLog,
    metrics: &Metrics,
    format: Format,
    dir: &Path,
) -> Result<(PathBuf, PathBuf), SimError> {
    let main = dir.join(format!("{}.{}", sc.name, format.extension()));
    let body = match format {
        Format::Csv => csv_string(log),
        Format::Json => serde_json::to_string_pretty(&json_value(log, metrics)).expect("json value"),
        Format::Svg => svg_string(sc, log),
    };
    write_file(&main, body.as_bytes())?;
    let side = dir.join(format!("{}.metrics.json", sc.name));
    write_file(&side, serde_json::to_string_pretty(metrics).expect("metrics").as_bytes())?;
    Ok((main, side))
}
