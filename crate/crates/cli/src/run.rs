//! Evaluate a spec into CSV tables.

use std::fs::File;
use std::io::{BufWriter, Write};

use rayon::prelude::*;
use slicing_core::{
    assess, delay_dps, region_map, solve_baseline, solve_monopolistic, solve_strategic,
    validate_closed_form, Load, MarketParams, ProfitReport, QueueConfig, SimConfig,
    ValidationReport,
};

use crate::error::CliError;
use crate::plot;
use crate::spec::{ScenarioKind, SweepSpec};

pub const BASELINE_HEADER: &[&str] =
    &["c", "mu", "lambda_d", "alpha1", "p1_star", "n1_star", "pi0_star", "status"];

pub const MONOPOLISTIC_HEADER: &[&str] = &[
    "c", "mu", "lambda_d", "alpha1", "gamma", "alpha2", "p1_star", "p2_star", "n1_star",
    "n2_star", "case", "pi_m_star", "status",
];

pub const STRATEGIC_HEADER: &[&str] = &[
    "c", "mu", "lambda_d", "alpha1", "gamma", "alpha2", "delta", "p1_star", "p2_star", "n1_star",
    "n2_star", "case", "pi1_star", "pi2_star", "converged", "pset_lo1", "pset_hi1", "pset_lo2",
    "pset_hi2", "status",
];

pub const FEASIBILITY_HEADER: &[&str] = &[
    "c", "mu", "lambda_d", "alpha1", "gamma", "alpha2", "delta", "pi0_star", "pi_m_star",
    "pi1_star", "pi2_star", "monopolistic_feasible", "strategic_feasible", "monopolistic_weak",
    "strategic_weak", "lump_lo", "lump_hi", "n_total_mono", "n_total_strat", "strat_exceeds",
    "status",
];

pub const REGIONMAP_HEADER: &[&str] = &["p1", "p2", "case", "n1", "n2"];

pub const SIM_HEADER: &[&str] = &[
    "replication", "mean_T1", "mean_T2", "analytic_T1", "analytic_T2", "rel_err_T1", "rel_err_T2",
];

/// A finished CSV table. `failures` counts rows whose status is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub failures: usize,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            failures: 0,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Everything a run produces before it is written out.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    /// Only for the simulator scenario.
    pub validation: Option<ValidationReport>,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn status(r: &Result<(), slicing_core::Error>) -> String {
    match r {
        Ok(()) => "ok".into(),
        Err(e) => format!("error:{}", e.kind()),
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    alpha1: f64,
    alpha2: f64,
    gamma: f64,
    delta: f64,
}

impl Point {
    fn queue(&self, spec: &SweepSpec) -> QueueConfig {
        QueueConfig {
            mu: spec.mu,
            lambda_d: spec.lambda_d,
            gamma: self.gamma,
        }
    }

    fn market(&self, spec: &SweepSpec) -> MarketParams {
        MarketParams {
            c: spec.c,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            delta: self.delta,
        }
    }
}

/// Sweep order: `alpha1`, then `alpha2`, then `delta`, with `gamma` innermost.
fn points(spec: &SweepSpec, with_delta: bool) -> Vec<Point> {
    let deltas = if with_delta { spec.delta.clone() } else { vec![0.0] };
    let mut out = Vec::new();
    for &alpha1 in &spec.alpha1 {
        for &alpha2 in &spec.alpha2 {
            for &delta in &deltas {
                for &gamma in &spec.gamma {
                    out.push(Point { alpha1, alpha2, gamma, delta });
                }
            }
        }
    }
    out
}

/// Evaluate every point of the spec. Rows are returned in sweep order no
/// matter how the worker pool schedules them.
pub fn execute(spec: &SweepSpec) -> Result<RunOutput, CliError> {
    let table = match spec.scenario {
        ScenarioKind::Baseline => sweep(spec, BASELINE_HEADER, baseline_points(spec), baseline_row),
        ScenarioKind::Monopolistic => {
            sweep(spec, MONOPOLISTIC_HEADER, points(spec, false), monopolistic_row)
        }
        ScenarioKind::Strategic => sweep(spec, STRATEGIC_HEADER, points(spec, true), strategic_row),
        ScenarioKind::Feasibility => {
            sweep(spec, FEASIBILITY_HEADER, points(spec, true), feasibility_row)
        }
        ScenarioKind::RegionMap => regionmap_table(spec)?,
        ScenarioKind::Sim => {
            let (table, report) = sim_table(spec)?;
            return Ok(RunOutput {
                table,
                validation: Some(report),
            });
        }
    };
    Ok(RunOutput {
        table,
        validation: None,
    })
}

/// Reject multi-valued axes that the scenario evaluates at a single point.
pub fn require_single_point(spec: &SweepSpec) -> Result<(), CliError> {
    let single = |name, xs: &[f64]| SweepSpec::single(name, xs).map(|_| ());
    single("alpha1", &spec.alpha1)?;
    match spec.scenario {
        ScenarioKind::Baseline => {}
        ScenarioKind::Monopolistic | ScenarioKind::RegionMap => {
            single("gamma", &spec.gamma)?;
            single("alpha2", &spec.alpha2)?;
        }
        ScenarioKind::Strategic | ScenarioKind::Feasibility => {
            single("gamma", &spec.gamma)?;
            single("alpha2", &spec.alpha2)?;
            single("delta", &spec.delta)?;
        }
        ScenarioKind::Sim => single("gamma", &spec.gamma)?,
    }
    Ok(())
}

fn baseline_points(spec: &SweepSpec) -> Vec<Point> {
    spec.alpha1
        .iter()
        .map(|&alpha1| Point { alpha1, alpha2: alpha1, gamma: 0.0, delta: 0.0 })
        .collect()
}

fn sweep(
    spec: &SweepSpec,
    header: &[&str],
    points: Vec<Point>,
    row: fn(&SweepSpec, &Point) -> (Vec<String>, bool),
) -> Table {
    let rows: Vec<(Vec<String>, bool)> = points.par_iter().map(|p| row(spec, p)).collect();
    let mut table = Table::new(header);
    for (r, ok) in rows {
        table.failures += usize::from(!ok);
        table.rows.push(r);
    }
    table
}

fn params(spec: &SweepSpec, p: &Point, head: &[&str]) -> Vec<String> {
    head.iter()
        .map(|h| match *h {
            "c" => num(spec.c),
            "mu" => num(spec.mu),
            "lambda_d" => num(spec.lambda_d),
            "alpha1" => num(p.alpha1),
            "alpha2" => num(p.alpha2),
            "gamma" => num(p.gamma),
            "delta" => num(p.delta),
            _ => unreachable!("not a parameter column: {h}"),
        })
        .collect()
}

/// Parameter columns, then either the result columns or blanks and the error.
fn finish(
    spec: &SweepSpec,
    p: &Point,
    head: &[&str],
    width: usize,
    result: Result<Vec<String>, slicing_core::Error>,
) -> (Vec<String>, bool) {
    let mut row = params(spec, p, head);
    let ok = result.is_ok();
    let (cells, st) = match result {
        Ok(cells) => (cells, status(&Ok(()))),
        Err(e) => (vec![String::new(); width], status(&Err(e))),
    };
    row.extend(cells);
    row.push(st);
    (row, ok)
}

fn baseline_row(spec: &SweepSpec, p: &Point) -> (Vec<String>, bool) {
    let r = solve_baseline(&p.queue(spec), &p.market(spec)).map(|r| {
        vec![num(r.p1), num(r.outcome.n1), num(r.profits.aggregate())]
    });
    finish(spec, p, &BASELINE_HEADER[..4], 3, r)
}

fn monopolistic_row(spec: &SweepSpec, p: &Point) -> (Vec<String>, bool) {
    let r = solve_monopolistic(&p.queue(spec), &p.market(spec)).map(|r| {
        vec![
            num(r.p1),
            opt(r.p2),
            num(r.outcome.n1),
            num(r.outcome.n2),
            r.outcome.case.to_string(),
            num(r.profits.aggregate()),
        ]
    });
    finish(spec, p, &MONOPOLISTIC_HEADER[..6], 6, r)
}

fn strategic_row(spec: &SweepSpec, p: &Point) -> (Vec<String>, bool) {
    let r = solve_strategic(&p.queue(spec), &p.market(spec)).map(|r| {
        let (pi1, pi2) = match r.profits {
            ProfitReport::Strategic { pi1, pi2 } => (pi1, pi2),
            other => (other.aggregate(), 0.0),
        };
        let set = r.diagnostics.equilibrium_set;
        vec![
            num(r.p1),
            opt(r.p2),
            num(r.outcome.n1),
            num(r.outcome.n2),
            r.outcome.case.to_string(),
            num(pi1),
            num(pi2),
            r.diagnostics.converged.to_string(),
            opt(set.map(|s| s.p1_lo)),
            opt(set.map(|s| s.p1_hi)),
            opt(set.map(|s| s.p2_lo)),
            opt(set.map(|s| s.p2_hi)),
        ]
    });
    finish(spec, p, &STRATEGIC_HEADER[..7], 12, r)
}

fn feasibility_row(spec: &SweepSpec, p: &Point) -> (Vec<String>, bool) {
    let r = assess(&p.queue(spec), &p.market(spec)).map(|f| {
        let (lo, hi) = match f.lump_sum_range {
            Some((lo, hi)) => (num(lo), num(hi)),
            None => (String::new(), String::new()),
        };
        vec![
            num(f.pi0_star),
            num(f.pi_m_star),
            num(f.pi1_star),
            num(f.pi2_star),
            f.monopolistic_feasible.to_string(),
            f.strategic_feasible.to_string(),
            f.monopolistic_weak.to_string(),
            f.strategic_weak.to_string(),
            lo,
            hi,
            num(f.totals.0),
            num(f.totals.1),
            (f.totals.1 > f.totals.0).to_string(),
        ]
    });
    finish(spec, p, &FEASIBILITY_HEADER[..7], 13, r)
}

fn regionmap_table(spec: &SweepSpec) -> Result<Table, CliError> {
    let point = Point {
        alpha1: SweepSpec::single("alpha1", &spec.alpha1)?,
        alpha2: SweepSpec::single("alpha2", &spec.alpha2)?,
        gamma: SweepSpec::single("gamma", &spec.gamma)?,
        delta: 0.0,
    };
    let map = region_map(
        &point.queue(spec),
        &point.market(spec),
        &spec.p1_grid,
        &spec.p2_grid,
    )?;
    let mut table = Table::new(REGIONMAP_HEADER);
    table.rows = map
        .iter()
        .map(|(p1, p2, o)| vec![num(p1), num(p2), o.case.to_string(), num(o.n1), num(o.n2)])
        .collect();
    Ok(table)
}

fn sim_table(spec: &SweepSpec) -> Result<(Table, ValidationReport), CliError> {
    let queue = QueueConfig::new(spec.mu, spec.lambda_d, SweepSpec::single("gamma", &spec.gamma)?)?;
    let load = Load::new(spec.sim.n1, spec.sim.n2)?;
    let cfg = SimConfig {
        warmup_departures: spec.sim.warmup,
        replications: spec.sim.replications,
        ..SimConfig::new(queue, load, spec.sim.departures, spec.seed)
    };
    let report = validate_closed_form(&cfg, spec.sim.tol)?;
    let (a1, a2) = delay_dps(&queue, &load)?;
    let rel = |x: Option<f64>, a: f64| opt(x.map(|x| (x - a).abs() / a));

    let mut table = Table::new(SIM_HEADER);
    for (i, r) in report.result.replications.iter().enumerate() {
        table.rows.push(vec![
            i.to_string(),
            opt(r.mean_t1),
            opt(r.mean_t2),
            num(a1),
            num(a2),
            rel(r.mean_t1, a1),
            rel(r.mean_t2, a2),
        ]);
    }
    let (t1, t2) = (report.result.t1, report.result.t2);
    table.rows.push(vec![
        "mean".into(),
        opt(t1.map(|e| e.mean)),
        opt(t2.map(|e| e.mean)),
        num(a1),
        num(a2),
        rel(t1.map(|e| e.mean), a1),
        rel(t2.map(|e| e.mean), a2),
    ]);
    table.rows.push(vec![
        "ci95".into(),
        opt(t1.map(|e| e.ci95)),
        opt(t2.map(|e| e.ci95)),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
    ]);
    table.failures = usize::from(!report.passed());
    Ok((table, report))
}

/// One-line summary of a simulator validation.
pub fn describe_validation(report: &ValidationReport) -> String {
    let class = |name: &str, c: Option<slicing_core::ClassValidation>| match c {
        Some(c) => format!(
            "{name}: analytic {} simulated {} +/- {} rel_err {} {}",
            c.analytic,
            c.simulated.mean,
            c.simulated.ci95,
            c.rel_err,
            if c.passed { "pass" } else { "fail" }
        ),
        None => format!("{name}: no departures"),
    };
    format!(
        "{}; {}; {}",
        class("T1", report.class1),
        class("T2", report.class2),
        if report.passed() { "PASS" } else { "FAIL" }
    )
}

/// Execute, write the CSV to the spec's output path (or `stdout`), render
/// the optional plot, and turn failed rows into a solver error.
pub fn run<W: Write>(spec: &SweepSpec, stdout: W, log: &mut dyn Write) -> Result<(), CliError> {
    if spec.svg.is_some() && spec.scenario == ScenarioKind::Sim {
        return Err(CliError::InvalidSpec("no plot is defined for the sim scenario".into()));
    }
    let output = execute(spec)?;
    match &spec.out {
        Some(path) => output.table.write_csv(BufWriter::new(File::create(path)?))?,
        None => output.table.write_csv(stdout)?,
    }
    if let Some(path) = &spec.svg {
        let svg = plot::render(spec.scenario, &output.table);
        std::fs::write(path, svg)?;
    }
    if let Some(report) = &output.validation {
        writeln!(log, "{}", describe_validation(report))?;
        if !report.passed() {
            return Err(CliError::Solver(
                "simulated means disagree with the closed forms".into(),
            ));
        }
    }
    if output.table.failures > 0 {
        return Err(CliError::Solver(format!(
            "{} of {} points failed; see the status column",
            output.table.failures,
            output.table.rows.len()
        )));
    }
    Ok(())
}
