//! Run configuration: command-line flags layered over an optional key-value
//! file, layered over defaults.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gasgeom::curvature::DEFAULT_SEED;
use gasgeom::model::{GasParameters, GeneralizedTemperature};
use gasgeom::tensor::Chart;

use crate::CliError;

/// Keys accepted in a config file; identical to the long flag names.
pub const KEYS: [&str; 12] =
    ["mass", "radius", "beta", "omega", "chart", "order", "theta-grid", "out", "format", "seed", "tolerance-scale", "only"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format '{s}' (expected json or csv)")),
        }
    }
}

/// `x,y,z` with exactly three finite components.
pub fn parse_omega(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated components, got {}", parts.len()));
    }
    let mut w = [0.0; 3];
    for (slot, p) in w.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("'{p}': {e}"))?;
        if !slot.is_finite() {
            return Err(format!("component '{p}' is not finite"));
        }
    }
    Ok(w)
}

pub fn parse_chart(s: &str) -> Result<Chart, String> {
    match Chart::parse(s) {
        Ok(Chart::EnergyMomentum) | Err(_) => Err(format!("unknown chart '{s}' (expected flat, beta-omega, u-omega or beta-M)")),
        Ok(c) => Ok(c),
    }
}

/// A validated θ grid; a newtype so that clap treats it as one value.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

pub fn parse_grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid)
}

/// Either `start:stop:count` (log-spaced, inclusive) or a comma-separated list.
/// The result must be non-empty, positive, strictly increasing and at most 1e6.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    let grid: Vec<f64> = if s.contains(':') {
        let f: Vec<&str> = s.split(':').collect();
        let [a, b, n] = f.as_slice() else {
            return Err(format!("range '{s}' must be start:stop:count"));
        };
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n.trim().parse().map_err(|e| format!("count '{n}': {e}"))?;
        if !(a > 0.0 && b > 0.0) {
            return Err("log-spaced range needs positive endpoints".into());
        }
        match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n).map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp()).collect(),
        }
    } else {
        s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<_, _>>()?
    };
    if grid.is_empty() {
        return Err("θ grid is empty".into());
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) || grid[grid.len() - 1] > 1e6 {
        return Err("θ grid must be positive, strictly increasing and at most 1e6".into());
    }
    Ok(grid)
}

fn num(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("'{s}': {e}"))
}

/// Parses the flat `key = value` format. Blank lines and lines starting with `#` are ignored.
pub fn read_file(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key = value", path.display(), n + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(CliError::Usage(format!("{}:{}: unknown key '{k}'", path.display(), n + 1)));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Values from the config file, parsed on demand.
pub struct Layer(HashMap<String, String>);

impl Layer {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        Ok(Layer(match path {
            Some(p) => read_file(p)?,
            None => HashMap::new(),
        }))
    }

    /// `flag` if given, else the file value parsed with `parse`, else `default`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, parse: impl Fn(&str) -> Result<T, String>, default: T) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.0.get(key) {
            Some(raw) => parse(raw).map_err(|e| CliError::Usage(format!("config key '{key}': {e}"))),
            None => Ok(default),
        }
    }

    pub fn pick_opt<T>(&self, flag: Option<T>, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.0.get(key).map(|raw| parse(raw).map_err(|e| CliError::Usage(format!("config key '{key}': {e}")))).transpose()
    }
}

pub fn parse_from_str<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

/// Fully resolved settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub gas: GasParameters,
    pub point: GeneralizedTemperature,
    pub chart: Chart,
    pub order: Option<usize>,
    pub grid: Option<Vec<f64>>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub only: Option<String>,
}

/// Flag values before layering; `None` means "not given on the command line".
#[derive(Debug, Default, Clone)]
pub struct Flags {
    pub config: Option<PathBuf>,
    pub mass: Option<f64>,
    pub radius: Option<f64>,
    pub beta: Option<f64>,
    pub omega: Option<[f64; 3]>,
    pub chart: Option<Chart>,
    pub order: Option<usize>,
    pub theta_grid: Option<Grid>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub tolerance_scale: Option<f64>,
    pub only: Option<String>,
}

impl RunConfig {
    /// Layers `flags` over the config file over defaults and validates the result.
    pub fn resolve(flags: Flags, default_format: Format) -> Result<Self, CliError> {
        let file = Layer::load(flags.config.as_deref())?;
        let usage = |e: gasgeom::Error| CliError::Usage(e.to_string());
        let mass = file.pick(flags.mass, "mass", parse_from_str, 1.0)?;
        let radius = file.pick(flags.radius, "radius", parse_from_str, 1.0)?;
        let gas = GasParameters::new(mass, radius).map_err(usage)?;
        let beta = file.pick(flags.beta, "beta", parse_from_str, 1.0)?;
        let omega = file.pick(flags.omega, "omega", parse_omega, [0.0; 3])?;
        let point = GeneralizedTemperature::new(beta, omega).map_err(usage)?;
        let order = file.pick_opt(flags.order, "order", parse_from_str)?;
        if let Some(n) = order {
            if !(1..=gasgeom::tensor::MAX_ORDER).contains(&n) {
                return Err(CliError::Usage(format!("--order must be in 1..={}, got {n}", gasgeom::tensor::MAX_ORDER)));
            }
        }
        let tolerance_scale = file.pick(flags.tolerance_scale, "tolerance-scale", parse_from_str, 1.0)?;
        if !(tolerance_scale > 0.0 && tolerance_scale.is_finite()) {
            return Err(CliError::Usage(format!("--tolerance-scale must be positive, got {tolerance_scale}")));
        }
        let only = file.pick_opt(flags.only, "only", |s| Ok(s.to_string()))?;
        if let Some(m) = &only {
            let known = gasgeom::verify::known_modules();
            if !known.contains(&m.as_str()) {
                return Err(CliError::Usage(format!("--only: unknown module '{m}' (expected one of {})", known.join(", "))));
            }
        }
        Ok(RunConfig {
            gas,
            point,
            chart: file.pick(flags.chart, "chart", parse_chart, Chart::BetaOmega)?,
            order,
            grid: file.pick_opt(flags.theta_grid.map(|g| g.0), "theta-grid", parse_grid)?,
            format: file.pick(flags.format, "format", parse_from_str, default_format)?,
            out: file.pick_opt(flags.out, "out", |s| Ok(PathBuf::from(s)))?,
            seed: file.pick(flags.seed, "seed", parse_from_str, DEFAULT_SEED)?,
            tolerance_scale,
            only,
        })
    }
}
