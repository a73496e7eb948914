//! `gasgeom`: evaluate the Hessian geometry of the rotating gas at a point, sweep
//! its high-velocity limits, or run the verification suite.

mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gasgeom::asymptotics::{default_grid, limit_suite, SweepResult};
use gasgeom::covderiv::cov_diff_z_upto;
use gasgeom::curvature::CurvatureReport;
use gasgeom::tensor::{multi_index, Chart, CovTensor};
use gasgeom::verify::{run_verification, VerifyConfig};

use config::{parse_chart, parse_grid_arg, parse_omega, Flags, Format, Grid, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] gasgeom::Error),
    #[error("{0}")]
    Failed(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

const CONFIG_HELP: &str = "\
CONFIG FILE
  --config PATH reads a flat text file of `key = value` lines; `#` starts a
  comment line. Keys are the long flag names: mass, radius, beta, omega,
  chart, order, theta-grid, out, format, seed, tolerance-scale, only.
  Precedence: command-line flags > config file > built-in defaults.

EXIT CODES
  0 success, 1 numerical or verification failure, 2 usage error.";

const SWEEP_HELP: &str = "\
CSV COLUMNS (in this order)
  quantity, theta, value, limit, rel_error, monotone, status
  Rows are grouped by quantity and sorted by theta. `rel_error` is relative to
  the limit, or absolute when the limit is 0. `monotone` refers to the whole
  quantity (error non-increasing over the last three grid points). `status` is
  `ok` or the failure message; a failed row has empty value and error columns.
  The command exits 0 when at least 90% of rows succeed.

GRID SPEC
  `start:stop:count` for log-spaced points, or a comma list such as `1,10,100`.";

#[derive(Parser, Debug)]
#[command(name = "gasgeom", version, about = "Hessian geometry of the rotating ideal gas in a ball", after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Flat key = value file of defaults (see CONFIG FILE below)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Particle mass m
    #[arg(long, global = true)]
    mass: Option<f64>,
    /// Ball radius R
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for sampled planes and random test points
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Metric, derivatives and curvature at one point, as JSON (default) or CSV
    #[command(after_help = CONFIG_HELP)]
    Eval {
        #[command(flatten)]
        common: Common,
        /// Inverse temperature β
        #[arg(long)]
        beta: Option<f64>,
        /// Angular velocity as x,y,z
        #[arg(long, value_parser = parse_omega, allow_hyphen_values = true)]
        omega: Option<[f64; 3]>,
        /// flat | beta-omega | u-omega | beta-M
        #[arg(long, value_parser = parse_chart)]
        chart: Option<Chart>,
        /// Also emit Dz, ..., Dⁿz (n ≤ 5)
        #[arg(long)]
        order: Option<usize>,
    },
    /// Convergence of every high-velocity limit over a θ grid, as CSV (default) or JSON
    #[command(after_help = SWEEP_HELP)]
    Sweep {
        #[command(flatten)]
        common: Common,
        /// θ = βω² grid (default 1:1e5:6)
        #[arg(long, value_parser = parse_grid_arg)]
        theta_grid: Option<Grid>,
    },
    /// Run the acceptance criteria; JSON verdict on stdout or --out, summary on stderr
    #[command(after_help = CONFIG_HELP)]
    Verify {
        #[command(flatten)]
        common: Common,
        /// Multiply every numerical tolerance by this factor
        #[arg(long)]
        tolerance_scale: Option<f64>,
        /// Run only the criteria touching this module
        #[arg(long)]
        only: Option<String>,
    },
}

fn flags(common: Common) -> Flags {
    Flags {
        config: common.config,
        mass: common.mass,
        radius: common.radius,
        out: common.out,
        format: common.format,
        seed: common.seed,
        ..Flags::default()
    }
}

/// Report plus the optional derivative list requested with `--order`.
#[derive(Serialize)]
struct EvalOutput {
    #[serde(flatten)]
    report: CurvatureReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivatives: Option<Vec<CovTensor>>,
}

fn cmd_eval(cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    let report = CurvatureReport::compute(&cfg.point, &cfg.gas, cfg.chart, cfg.seed)?;
    let derivatives = cfg.order.map(|n| cov_diff_z_upto(n, &cfg.point, &cfg.gas, cfg.chart)).transpose()?;
    match cfg.format {
        Format::Json => Ok(json(&EvalOutput { report, derivatives })?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["tensor", "chart", "index", "value"]).map_err(csv_err)?;
            let mut tensors: Vec<(String, &CovTensor)> = vec![
                ("g".into(), &report.g),
                ("g_inv".into(), &report.g_inv),
                ("dg".into(), &report.dg),
                ("d2g".into(), &report.d2g),
                ("k".into(), &report.k),
                ("riem".into(), &report.riem),
            ];
            if let Some(d) = &derivatives {
                tensors.extend(d.iter().enumerate().map(|(i, t)| (format!("D{}z", i + 1), t)));
            }
            for (name, t) in tensors {
                for (flat, v) in t.data().iter().enumerate() {
                    let idx = multi_index(flat, t.order())[..t.order()].iter().map(|i| i.to_string()).collect::<Vec<_>>().join("-");
                    w.write_record([name.as_str(), report.chart.label(), &idx, &v.to_string()]).map_err(csv_err)?;
                }
            }
            for (name, v) in [
                ("sectional_min", report.sectional_min),
                ("sectional_max", report.sectional_max),
                ("kn_deviation", report.kn_deviation),
                ("riemann_symmetry_defect", report.riemann_symmetry_defect),
            ] {
                w.write_record([name, report.chart.label(), "", &v.to_string()]).map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| CliError::Failed(e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct SweepRow<'a> {
    quantity: &'a str,
    theta: f64,
    value: Option<f64>,
    limit: f64,
    rel_error: Option<f64>,
    monotone: bool,
    status: String,
}

fn sweep_rows(sweeps: &[SweepResult]) -> Vec<SweepRow<'_>> {
    let mut rows = Vec::new();
    for s in sweeps {
        let limit = s.points.first().map_or(f64::NAN, |p| p.limit);
        let mut part: Vec<SweepRow> = s
            .points
            .iter()
            .map(|p| SweepRow {
                quantity: &s.quantity,
                theta: p.theta,
                value: Some(p.value),
                limit: p.limit,
                rel_error: Some(p.rel_error),
                monotone: s.monotone,
                status: "ok".into(),
            })
            .collect();
        part.extend(s.failures.iter().map(|(t, e)| SweepRow {
            quantity: &s.quantity,
            theta: *t,
            value: None,
            limit,
            rel_error: None,
            monotone: s.monotone,
            status: e.clone(),
        }));
        part.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        rows.extend(part);
    }
    rows
}

fn cmd_sweep(cfg: &RunConfig) -> Result<(Vec<u8>, bool), CliError> {
    let grid = cfg.grid.clone().unwrap_or_else(default_grid);
    let sweeps = limit_suite(&cfg.gas, &grid)?;
    let rows = sweep_rows(&sweeps);
    let ok = rows.iter().filter(|r| r.status == "ok").count();
    let enough = ok * 10 >= rows.len() * 9;
    let bytes = match cfg.format {
        Format::Json => json(&sweeps)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?
        }
    };
    Ok((bytes, enough))
}

fn cmd_verify(cfg: &RunConfig) -> Result<(Vec<u8>, Option<String>), CliError> {
    let vc = VerifyConfig { seed: cfg.seed, tolerance_scale: cfg.tolerance_scale, only: cfg.only.clone() };
    let report = run_verification(&vc)?;
    let mut err = std::io::stderr().lock();
    for c in &report.criteria {
        writeln!(err, "{}", c.summary())?;
        for k in c.failing() {
            writeln!(err, "      failing: {} = {:e} (tolerance {:e})", k.label, k.value, k.tolerance)?;
        }
    }
    writeln!(err, "{} of {} criteria passed in {:.2} s", report.criteria.iter().filter(|c| c.passed).count(), report.criteria.len(), report.seconds)?;
    let bytes = match cfg.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["criterion", "name", "check", "value", "tolerance", "passed"]).map_err(csv_err)?;
            for c in &report.criteria {
                for k in &c.checks {
                    w.write_record([&c.id.to_string(), &c.name, &k.label, &k.value.to_string(), &k.tolerance.to_string(), &k.passed.to_string()])
                        .map_err(csv_err)?;
                }
            }
            w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?
        }
    };
    let failure = (!report.passed).then(|| format!("failing criteria: {:?}", report.failing_ids()));
    Ok((bytes, failure))
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_vec_pretty(v).map_err(|e| CliError::Failed(e.to_string()))?;
    s.push(b'\n');
    Ok(s)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Failed(format!("csv: {e}"))
}

fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval { common, beta, omega, chart, order } => {
            let cfg = RunConfig::resolve(Flags { beta, omega, chart, order, ..flags(common) }, Format::Json)?;
            let out = cmd_eval(&cfg)?;
            emit(&cfg, &out)
        }
        Command::Sweep { common, theta_grid } => {
            let cfg = RunConfig::resolve(Flags { theta_grid, ..flags(common) }, Format::Csv)?;
            let (out, enough) = cmd_sweep(&cfg)?;
            emit(&cfg, &out)?;
            if enough {
                Ok(())
            } else {
                Err(CliError::Failed("fewer than 90% of sweep rows succeeded".into()))
            }
        }
        Command::Verify { common, tolerance_scale, only } => {
            let cfg = RunConfig::resolve(Flags { tolerance_scale, only, ..flags(common) }, Format::Json)?;
            let (out, failure) = cmd_verify(&cfg)?;
            emit(&cfg, &out)?;
            failure.map_or(Ok(()), |f| Err(CliError::Failed(f)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gasgeom: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
