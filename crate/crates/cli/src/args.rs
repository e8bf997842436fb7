//! Command-line parsing.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::run::{require_single_point, run};
use crate::spec::{ScenarioKind, Settings, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "slicing", version, about = "Equilibria of two operators sharing a sliced network")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one parameter point of a scenario.
    Eval(Flags),
    /// Sweep the parameter grid of a scenario.
    Sweep(Flags),
    /// Subscription case and counts over a price grid.
    Regionmap(Flags),
    /// Simulate the queue and compare with the closed-form delays.
    Sim(Flags),
    /// Profitability of the two sharing models against the baseline.
    Feasibility(Flags),
}

/// Every setting, as text. Lists take comma-separated values and inclusive
/// `start:stop:step` ranges.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// File of `key = value` lines using the flag names; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// baseline, monopolistic, strategic, feasibility, regionmap or sim.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Utility scale [default: 1].
    #[arg(long)]
    pub c: Option<String>,
    /// Service rate [default: 1].
    #[arg(long)]
    pub mu: Option<String>,
    /// Per-subscriber arrival rate [default: 0.01].
    #[arg(long)]
    pub lambda_d: Option<String>,
    /// Delay sensitivity of the network operator's base [default: 0.6].
    #[arg(long)]
    pub alpha1: Option<String>,
    /// Delay sensitivity of the virtual operator's base [default: 0.2,0.4,0.6,0.8,1.0].
    #[arg(long)]
    pub alpha2: Option<String>,
    /// Slice weight of the virtual operator [default: 0:1:0.02].
    #[arg(long)]
    pub gamma: Option<String>,
    /// Per-subscriber fee paid to the network operator [default: 0.05,0.10,0.15,0.20].
    #[arg(long)]
    pub delta: Option<String>,
    /// Price grid for both axes of a region map [default: 0:1.2:0.01].
    #[arg(long)]
    pub p_grid: Option<String>,
    #[arg(long)]
    pub p1_grid: Option<String>,
    #[arg(long)]
    pub p2_grid: Option<String>,
    /// Simulated network operator subscribers [default: 1].
    #[arg(long)]
    pub n1: Option<String>,
    /// Simulated virtual operator subscribers [default: 1].
    #[arg(long)]
    pub n2: Option<String>,
    /// Measured departures per replication [default: 1e5].
    #[arg(long)]
    pub departures: Option<String>,
    /// Discarded departures per replication [default: 10% of departures].
    #[arg(long)]
    pub warmup: Option<String>,
    /// Independent replications [default: 10].
    #[arg(long)]
    pub replications: Option<String>,
    /// Relative tolerance of the simulator check [default: 0.02].
    #[arg(long)]
    pub tol: Option<String>,
    /// Simulator seed [default: 1].
    #[arg(long)]
    pub seed: Option<String>,
    /// CSV output path [default: stdout].
    #[arg(long)]
    pub out: Option<String>,
    /// Also render an SVG plot to this path.
    #[arg(long)]
    pub svg: Option<String>,
}

impl Flags {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = Settings::new();
        let pairs = [
            ("scenario", &self.scenario),
            ("c", &self.c),
            ("mu", &self.mu),
            ("lambda-d", &self.lambda_d),
            ("alpha1", &self.alpha1),
            ("alpha2", &self.alpha2),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
            ("p-grid", &self.p_grid),
            ("p1-grid", &self.p1_grid),
            ("p2-grid", &self.p2_grid),
            ("n1", &self.n1),
            ("n2", &self.n2),
            ("departures", &self.departures),
            ("warmup", &self.warmup),
            ("replications", &self.replications),
            ("tol", &self.tol),
            ("seed", &self.seed),
            ("out", &self.out),
            ("svg", &self.svg),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                s.set(key, v.as_str())?;
            }
        }
        Ok(s)
    }
}

impl Command {
    /// Merge config file and flags into a validated spec.
    pub fn spec(&self) -> Result<SweepSpec, CliError> {
        let (flags, fixed) = match self {
            Command::Eval(f) | Command::Sweep(f) => (f, None),
            Command::Regionmap(f) => (f, Some(ScenarioKind::RegionMap)),
            Command::Sim(f) => (f, Some(ScenarioKind::Sim)),
            Command::Feasibility(f) => (f, Some(ScenarioKind::Feasibility)),
        };
        let file = match &flags.config {
            Some(path) => Settings::load(path)?,
            None => Settings::new(),
        };
        let mut settings = file.overlay(flags.settings()?);
        if let Some(kind) = fixed {
            match settings.get("scenario") {
                Some(s) if s != kind.as_str() => {
                    return Err(CliError::InvalidSpec(format!(
                        "scenario '{s}' conflicts with the {} subcommand",
                        kind.as_str()
                    )))
                }
                _ => settings.set("scenario", kind.as_str())?,
            }
        }
        let spec = SweepSpec::from_settings(&settings)?;
        if matches!(self, Command::Eval(_)) {
            require_single_point(&spec)?;
        }
        Ok(spec)
    }
}

/// Parse `args`, run, and return the process exit status. Errors are
/// reported on `stderr` as one JSON line.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let err = CliError::InvalidSpec(e.kind().to_string());
            let _ = write!(stderr, "{e}");
            let _ = writeln!(stderr, "{}", err.report());
            return err.exit_code();
        }
    };
    let result = cli
        .command
        .spec()
        .and_then(|spec| run(&spec, &mut *stdout, &mut *stderr));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = stdout.flush();
            let _ = writeln!(stderr, "{}", e.report());
            e.exit_code()
        }
    }
}
