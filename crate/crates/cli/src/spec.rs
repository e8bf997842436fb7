//! Run specification: flags, config files and their validation.
//!
//! A config file holds one `key = value` pair per line, with keys spelled
//! like the long flags (`lambda-d = 0.01`). Blank lines and `#` comments are
//! ignored. Flags given on the command line override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use slicing_core::{MarketParams, QueueConfig};

use crate::error::CliError;

/// Keys accepted in config files and on the command line.
pub const KEYS: &[&str] = &[
    "scenario",
    "c",
    "mu",
    "lambda-d",
    "alpha1",
    "alpha2",
    "gamma",
    "delta",
    "p-grid",
    "p1-grid",
    "p2-grid",
    "n1",
    "n2",
    "departures",
    "warmup",
    "replications",
    "tol",
    "seed",
    "out",
    "svg",
];

pub const DEFAULT_GAMMA: &str = "0:1:0.02";
pub const DEFAULT_ALPHA: &str = "0.2,0.4,0.6,0.8,1.0";
pub const DEFAULT_DELTA: &str = "0.05,0.10,0.15,0.20";
pub const DEFAULT_P_GRID: &str = "0:1.2:0.01";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Baseline,
    Monopolistic,
    Strategic,
    Feasibility,
    RegionMap,
    Sim,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Baseline => "baseline",
            ScenarioKind::Monopolistic => "monopolistic",
            ScenarioKind::Strategic => "strategic",
            ScenarioKind::Feasibility => "feasibility",
            ScenarioKind::RegionMap => "regionmap",
            ScenarioKind::Sim => "sim",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "baseline" => ScenarioKind::Baseline,
            "monopolistic" => ScenarioKind::Monopolistic,
            "strategic" => ScenarioKind::Strategic,
            "feasibility" => ScenarioKind::Feasibility,
            "regionmap" => ScenarioKind::RegionMap,
            "sim" => ScenarioKind::Sim,
            _ => return Err(CliError::InvalidSpec(format!("unknown scenario '{s}'"))),
        })
    }
}

/// Defaults of the numerical experiments: `c = 1`, `mu = 1`, `lambda_d = 0.01`.
pub fn defaults() -> (MarketParams, QueueConfig) {
    (
        MarketParams {
            c: 1.0,
            alpha1: 0.6,
            alpha2: 0.6,
            delta: 0.0,
        },
        QueueConfig {
            mu: 1.0,
            lambda_d: 0.01,
            gamma: 0.5,
        },
    )
}

/// Simulator settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub n1: f64,
    pub n2: f64,
    pub departures: u64,
    pub warmup: Option<u64>,
    pub replications: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario: ScenarioKind,
    pub c: f64,
    pub mu: f64,
    pub lambda_d: f64,
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
    pub p1_grid: Vec<f64>,
    pub p2_grid: Vec<f64>,
    pub sim: SimSpec,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// Raw `key -> value` settings before interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::InvalidSpec(format!("unknown key '{key}'")));
        }
        self.0.insert(key, value.into().trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn parse_config(text: &str) -> Result<Self, CliError> {
        let mut s = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::InvalidSpec(format!("config line {}: expected key = value", i + 1))
            })?;
            s.set(k, v)?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::InvalidSpec(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse_config(&text)
    }

    /// Values of `other` take precedence.
    pub fn overlay(mut self, other: Settings) -> Self {
        self.0.extend(other.0);
        self
    }
}

/// Parse a list of values: comma-separated items, each a number or an
/// inclusive range `start:stop:step`.
pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| CliError::InvalidSpec(msg);
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_f64(v)?),
            [a, b, step] => {
                let (a, b, step) = (parse_f64(a)?, parse_f64(b)?, parse_f64(step)?);
                if !(step > 0.0) || b < a {
                    return Err(bad(format!("range '{item}' needs start <= stop and step > 0")));
                }
                // Round the count so that 0:1:0.02 ends exactly at 1.
                let n = ((b - a) / step + 1e-9).floor() as usize;
                if n > 10_000_000 {
                    return Err(bad(format!("range '{item}' is too long")));
                }
                out.extend((0..=n).map(|k| {
                    let v = a + k as f64 * step;
                    // Snap accumulated rounding onto short decimals.
                    let r = (v * 1e12).round() / 1e12;
                    if (r - v).abs() <= 1e-12 * (1.0 + v.abs()) {
                        r
                    } else {
                        v
                    }
                }));
            }
            _ => return Err(bad(format!("cannot parse '{item}' as value or start:stop:step"))),
        }
    }
    if out.is_empty() {
        return Err(bad(format!("empty list '{s}'")));
    }
    Ok(out)
}

fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::InvalidSpec(format!("'{s}' is not a finite number")))
}

fn parse_count(key: &str, s: &str) -> Result<u64, CliError> {
    let v = parse_f64(s)?;
    if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(CliError::InvalidSpec(format!("{key} must be a non-negative integer, got '{s}'")));
    }
    Ok(v as u64)
}

impl SweepSpec {
    /// Interpret settings, filling in defaults, and validate the result.
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let scenario: ScenarioKind = s
            .get("scenario")
            .ok_or_else(|| CliError::InvalidSpec("missing scenario".into()))?
            .parse()?;
        let (market, queue) = defaults();
        let scalar = |key: &str, default: f64| -> Result<f64, CliError> {
            s.get(key).map(parse_f64).unwrap_or(Ok(default))
        };
        let list = |key: &str, default: &str| parse_list(s.get(key).unwrap_or(default));
        let p_grid = s.get("p-grid").unwrap_or(DEFAULT_P_GRID);
        let spec = SweepSpec {
            scenario,
            c: scalar("c", market.c)?,
            mu: scalar("mu", queue.mu)?,
            lambda_d: scalar("lambda-d", queue.lambda_d)?,
            alpha1: list("alpha1", "0.6")?,
            alpha2: list("alpha2", DEFAULT_ALPHA)?,
            gamma: list("gamma", DEFAULT_GAMMA)?,
            delta: list("delta", DEFAULT_DELTA)?,
            p1_grid: parse_list(s.get("p1-grid").unwrap_or(p_grid))?,
            p2_grid: parse_list(s.get("p2-grid").unwrap_or(p_grid))?,
            sim: SimSpec {
                n1: scalar("n1", 1.0)?,
                n2: scalar("n2", 1.0)?,
                departures: s.get("departures").map(|v| parse_count("departures", v)).unwrap_or(Ok(100_000))?,
                warmup: s.get("warmup").map(|v| parse_count("warmup", v)).transpose()?,
                replications: s
                    .get("replications")
                    .map(|v| parse_count("replications", v))
                    .unwrap_or(Ok(10))? as usize,
                tol: scalar("tol", 0.02)?,
            },
            seed: s.get("seed").map(|v| parse_count("seed", v)).unwrap_or(Ok(1))?,
            out: s.get("out").map(PathBuf::from),
            svg: s.get("svg").map(PathBuf::from),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::InvalidSpec(m));
        if !(self.c > 0.0) {
            return bad(format!("c must be > 0, got {}", self.c));
        }
        if !(self.mu > 0.0) {
            return bad(format!("mu must be > 0, got {}", self.mu));
        }
        if !(self.lambda_d > 0.0) {
            return bad(format!("lambda-d must be > 0, got {}", self.lambda_d));
        }
        for (name, xs) in [("alpha1", &self.alpha1), ("alpha2", &self.alpha2)] {
            if let Some(a) = xs.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
                return bad(format!("{name} values must lie in (0, 1], got {a}"));
            }
        }
        if let Some(g) = self.gamma.iter().find(|&&g| !(0.0..=1.0).contains(&g)) {
            return bad(format!("gamma values must lie in [0, 1], got {g}"));
        }
        if let Some(d) = self.delta.iter().find(|&&d| !(d >= 0.0)) {
            return bad(format!("delta values must be >= 0, got {d}"));
        }
        for (name, grid) in [("p1-grid", &self.p1_grid), ("p2-grid", &self.p2_grid)] {
            if grid.iter().any(|&p| p < 0.0) || grid.windows(2).any(|w| w[1] <= w[0]) {
                return bad(format!("{name} must be non-negative and strictly increasing"));
            }
        }
        if !(self.sim.n1 >= 0.0 && self.sim.n2 >= 0.0) {
            return bad("n1 and n2 must be >= 0".into());
        }
        if self.sim.departures == 0 || self.sim.replications == 0 {
            return bad("departures and replications must be >= 1".into());
        }
        if !(self.sim.tol >= 0.0) {
            return bad(format!("tol must be >= 0, got {}", self.sim.tol));
        }
        Ok(())
    }

    /// Require a single value on an axis, for point evaluations.
    pub fn single(name: &str, xs: &[f64]) -> Result<f64, CliError> {
        match xs {
            [x] => Ok(*x),
            _ => Err(CliError::InvalidSpec(format!(
                "{name} must be a single value here, got {} values",
                xs.len()
            ))),
        }
    }
}
