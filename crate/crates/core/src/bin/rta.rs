use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aircraft_rta::sim::check::{sweep_table, sweep_values};
use aircraft_rta::sim::{self, export, Format, Scenario, SimError};

const EXIT_VIOLATION: u8 = 1;
const EXIT_SCHEMA_IO: u8 = 2;
const EXIT_ABORT: u8 = 3;

#[derive(Parser)]
#[command(name = "rta", version, about = "Run-time assurance scenario simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write the trajectory plus a metrics summary.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, env = "RTA_OUT_DIR", default_value = "rta-out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Override the scenario step size (s).
        #[arg(long)]
        dt: Option<f64>,
        /// Override the scenario horizon (s).
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Simulate and evaluate the scenario's acceptance thresholds.
    Check {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Vary one numeric scenario field (dotted JSON path) over a grid.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        steps: usize,
        /// Also write the table to `<out>/<name>.sweep.csv`.
        #[arg(long, env = "RTA_OUT_DIR")]
        out: Option<PathBuf>,
    },
}

fn fail(err: SimError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(EXIT_SCHEMA_IO)
}

fn load(path: &PathBuf, dt: Option<f64>, horizon: Option<f64>) -> Result<Scenario, SimError> {
    let mut sc = Scenario::load(path)?;
    if dt.is_some() || horizon.is_some() {
        sc.dt = dt.unwrap_or(sc.dt);
        sc.horizon = horizon.unwrap_or(sc.horizon);
        sc.validate()?;
    }
    Ok(sc)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out, format, dt, horizon } => {
            let sc = match load(&scenario, dt, horizon) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let log = sim::integrate(&sc);
            let m = sim::compute_metrics(&sc, &log);
            let (main, side) = match export(&sc, &log, &m, format, &out) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            println!("wrote {} and {}", main.display(), side.display());
            println!(
                "steps {}  min h_p {:.6}  min {} {:.6}  intervention {:.2} s",
                m.steps,
                m.min_h_p,
                sc.rta.barrier_name(),
                m.min_h_mode,
                m.intervention_duration
            );
            match &log.abort {
                Some(a) if !sc.acceptance.allow_abort => {
                    eprintln!("numerical abort at t = {}: {}", a.t, a.reason);
                    ExitCode::from(EXIT_ABORT)
                }
                Some(a) => {
                    println!("run ended at t = {} ({}), permitted by the scenario", a.t, a.reason);
                    ExitCode::SUCCESS
                }
                None => ExitCode::SUCCESS,
            }
        }
        Command::Check { scenario } => {
            let sc = match Scenario::load(&scenario) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let (_, _, report) = sim::check(&sc);
            println!("{report}");
            if report.unexpected_abort {
                ExitCode::from(EXIT_ABORT)
            } else if !report.passed() {
                ExitCode::from(EXIT_VIOLATION)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Sweep { scenario, param, min, max, steps, out } => {
            let sc = match Scenario::load(&scenario) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let rows = match sim::sweep(&sc, &param, &sweep_values(min, max, steps)) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let table = sweep_table(&param, &rows);
            print!("{table}");
            if let Some(dir) = out {
                let path = dir.join(format!("{}.sweep.csv", sc.name));
                let written = std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(&path, &table));
                if let Err(source) = written {
                    return fail(SimError::Write { path, source });
                }
            }
            if rows.iter().all(|r| r.passed == Some(true)) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATION)
            }
        }
    }
}
