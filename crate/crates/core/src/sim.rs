//! Discrete-event simulation of the two-class M/M/1-DPS queue.
//!
//! With exponential service requirements the residual work of every job is
//! memoryless, so the state is just the number of jobs per class. Between
//! events each class-`i` job completes at rate `mu w_i / (k1 w1 + k2 w2)`
//! with `w1 = 1 - gamma`, `w2 = gamma`; the total completion rate is `mu`
//! whenever the system is non-empty.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::queueing::{check_stability, delay_dps, Load, QueueConfig};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub queue: QueueConfig,
    pub load: Load,
    /// Departures discarded before measuring; `None` means 10% of
    /// `measured_departures`.
    pub warmup_departures: Option<u64>,
    pub measured_departures: u64,
    pub replications: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(queue: QueueConfig, load: Load, measured_departures: u64, seed: u64) -> Self {
        Self {
            queue,
            load,
            warmup_departures: None,
            measured_departures,
            replications: 10,
            seed,
        }
    }

    pub fn warmup(&self) -> u64 {
        self.warmup_departures
            .unwrap_or(self.measured_departures / 10)
    }

    pub fn validate(&self) -> Result<()> {
        self.queue.validate()?;
        if self.measured_departures == 0 {
            return Err(Error::InvalidConfig("measured_departures must be >= 1".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if !check_stability(&self.queue, &self.load) {
            return Err(Error::UnstableLoad {
                lambda: self.queue.lambda_d * self.load.total(),
                mu: self.queue.mu,
            });
        }
        Ok(())
    }
}

/// Replication-averaged mean sojourn time of one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassEstimate {
    pub mean: f64,
    /// Half-width of the 95% confidence interval; infinite with a single
    /// replication.
    pub ci95: f64,
}

impl ClassEstimate {
    pub fn contains(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.ci95
    }
}

/// Per-class sample means of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replication {
    pub mean_t1: Option<f64>,
    pub mean_t2: Option<f64>,
    pub departures: (u64, u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// `None` for a class that never departed during measurement.
    pub t1: Option<ClassEstimate>,
    pub t2: Option<ClassEstimate>,
    /// Measured departures per class summed over replications.
    pub departures_counted: (u64, u64),
    pub replications: Vec<Replication>,
}

pub fn simulate_dps(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let reps: Vec<Replication> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| run_replication(cfg, r as u64))
        .collect();
    let estimate = |pick: fn(&Replication) -> Option<f64>| {
        let xs: Vec<f64> = reps.iter().filter_map(pick).collect();
        summarize(&xs)
    };
    let departures_counted = reps
        .iter()
        .fold((0, 0), |acc, r| (acc.0 + r.departures.0, acc.1 + r.departures.1));
    Ok(SimResult {
        t1: estimate(|r| r.mean_t1),
        t2: estimate(|r| r.mean_t2),
        departures_counted,
        replications: reps,
    })
}

fn summarize(xs: &[f64]) -> Option<ClassEstimate> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ci95 = if xs.len() < 2 {
        f64::INFINITY
    } else {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Z95 * (var / n).sqrt()
    };
    Some(ClassEstimate { mean, ci95 })
}

fn run_replication(cfg: &SimConfig, rep: u64) -> Replication {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(rep);
    let q = &cfg.queue;
    let rates = [q.lambda_d * cfg.load.n1, q.lambda_d * cfg.load.n2];
    let weights = [1.0 - q.gamma, q.gamma];
    let arrival_rate = rates[0] + rates[1];

    // Arrival epochs of the jobs present, per class.
    let mut jobs: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut sums = [0.0f64; 2];
    let mut counts = [0u64; 2];
    let mut t = 0.0;
    let warmup = cfg.warmup();
    let mut departed = 0u64;
    let total = warmup + cfg.measured_departures;

    while departed < total {
        let busy = !(jobs[0].is_empty() && jobs[1].is_empty());
        let event_rate = arrival_rate + if busy { q.mu } else { 0.0 };
        t += Exp::new(event_rate).expect("positive event rate").sample(&mut rng);
        let u: f64 = rng.gen::<f64>() * event_rate;
        if u < arrival_rate {
            let class = usize::from(u >= rates[0]);
            jobs[class].push(t);
            continue;
        }
        let class_rates = departure_rates(q.mu, weights, [jobs[0].len(), jobs[1].len()]);
        assert!(
            ((class_rates[0] + class_rates[1]) - q.mu).abs() <= 1e-12 * q.mu,
            "departure rates must sum to mu"
        );
        let class = usize::from(u - arrival_rate >= class_rates[0]);
        let idx = rng.gen_range(0..jobs[class].len());
        let arrived = jobs[class].swap_remove(idx);
        departed += 1;
        if departed > warmup {
            sums[class] += t - arrived;
            counts[class] += 1;
        }
    }
    let mean = |i: usize| (counts[i] > 0).then(|| sums[i] / counts[i] as f64);
    Replication {
        mean_t1: mean(0),
        mean_t2: mean(1),
        departures: (counts[0], counts[1]),
    }
}

/// Aggregate completion rate of each class with `k` jobs present. When all
/// present jobs have zero weight they share the server equally.
fn departure_rates(mu: f64, w: [f64; 2], k: [usize; 2]) -> [f64; 2] {
    let k = [k[0] as f64, k[1] as f64];
    let den = k[0] * w[0] + k[1] * w[1];
    if den > 0.0 {
        let r1 = mu * k[0] * w[0] / den;
        [r1, mu - r1]
    } else {
        let r1 = mu * k[0] / (k[0] + k[1]);
        [r1, mu - r1]
    }
}

/// Comparison of one class against its closed-form mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassValidation {
    pub analytic: f64,
    pub simulated: ClassEstimate,
    pub rel_err: f64,
    pub within_ci: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub analytic: (f64, f64),
    /// `None` for a class without measured departures.
    pub class1: Option<ClassValidation>,
    pub class2: Option<ClassValidation>,
    pub result: SimResult,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        [self.class1, self.class2]
            .iter()
            .flatten()
            .all(|c| c.passed)
    }
}

/// Simulate and compare against [`delay_dps`]. A class passes when the
/// analytic mean lies inside the 95% interval or the relative error is at
/// most `tol_rel`.
pub fn validate_closed_form(cfg: &SimConfig, tol_rel: f64) -> Result<ValidationReport> {
    let result = simulate_dps(cfg)?;
    let analytic = delay_dps(&cfg.queue, &cfg.load)?;
    let check = |est: Option<ClassEstimate>, a: f64| {
        est.map(|s| {
            let rel_err = (s.mean - a).abs() / a;
            let within_ci = s.contains(a);
            ClassValidation {
                analytic: a,
                simulated: s,
                rel_err,
                within_ci,
                passed: within_ci || rel_err <= tol_rel,
            }
        })
    };
    Ok(ValidationReport {
        analytic,
        class1: check(result.t1, analytic.0),
        class2: check(result.t2, analytic.1),
        result,
    })
}
