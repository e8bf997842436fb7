//! Whether sharing the network through a virtual operator pays off for the
//! network operator, compared with serving its own base alone.

use crate::error::Result;
use crate::market::MarketParams;
use crate::pricing::{solve_baseline, solve_monopolistic, solve_strategic};
use crate::queueing::QueueConfig;

/// Relative margin applied to every profit comparison, in units of `pi0*`.
pub const FEASIBILITY_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub pi0_star: f64,
    pub pi_m_star: f64,
    pub pi1_star: f64,
    pub pi2_star: f64,
    /// `pi_m* > pi0*` by more than the margin.
    pub monopolistic_feasible: bool,
    /// `pi1* + pi2* > pi0*` by more than the margin: some lump sum paid by
    /// the virtual operator leaves both operators at least as well off.
    pub strategic_feasible: bool,
    /// `pi_m* >= pi0*` up to the margin.
    pub monopolistic_weak: bool,
    /// `pi1* >= pi0*` up to the margin: no transfer needed.
    pub strategic_weak: bool,
    /// Transfers `m` from the virtual to the network operator acceptable to
    /// both: `[max(0, pi0* - pi1*), pi2*]`, `None` when empty.
    pub lump_sum_range: Option<(f64, f64)>,
    /// Total subscribers `(monopolistic, strategic)`.
    pub totals: (f64, f64),
}

impl FeasibilityReport {
    /// Build a report from the four optimal profits; every flag is a pure
    /// function of these numbers.
    pub fn from_profits(pi0: f64, pi_m: f64, pi1: f64, pi2: f64, totals: (f64, f64)) -> Self {
        let margin = FEASIBILITY_MARGIN * pi0.abs();
        Self {
            pi0_star: pi0,
            pi_m_star: pi_m,
            pi1_star: pi1,
            pi2_star: pi2,
            monopolistic_feasible: pi_m - pi0 > margin,
            strategic_feasible: pi1 + pi2 - pi0 > margin,
            monopolistic_weak: pi_m - pi0 >= -margin,
            strategic_weak: pi1 - pi0 >= -margin && pi2 >= -margin,
            lump_sum_range: lump_sum_range(pi0, pi1, pi2),
            totals,
        }
    }

    /// Flags and interval agree with the stored profits.
    pub fn is_consistent(&self) -> bool {
        let again = Self::from_profits(
            self.pi0_star,
            self.pi_m_star,
            self.pi1_star,
            self.pi2_star,
            self.totals,
        );
        again == *self
    }
}

/// `[max(0, pi0 - pi1), pi2]` when non-empty.
pub fn lump_sum_range(pi0: f64, pi1: f64, pi2: f64) -> Option<(f64, f64)> {
    let lo = (pi0 - pi1).max(0.0);
    (lo <= pi2).then_some((lo, pi2))
}

/// Run the three business models on the same parameters and evaluate the
/// feasibility conditions.
pub fn assess(queue: &QueueConfig, market: &MarketParams) -> Result<FeasibilityReport> {
    let base = solve_baseline(queue, market)?;
    let (mono, strat) = rayon::join(
        || solve_monopolistic(queue, market),
        || solve_strategic(queue, market),
    );
    let (mono, strat) = (mono?, strat?);
    let (pi1, pi2) = match strat.profits {
        crate::market::ProfitReport::Strategic { pi1, pi2 } => (pi1, pi2),
        _ => unreachable!("strategic solver reports strategic profits"),
    };
    Ok(FeasibilityReport::from_profits(
        base.profits.aggregate(),
        mono.profits.aggregate(),
        pi1,
        pi2,
        (mono.total_subscribers(), strat.total_subscribers()),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubscriberComparison {
    pub n_mono: f64,
    pub n_strat: f64,
    pub strat_exceeds: bool,
}

pub fn compare_total_subscribers(
    queue: &QueueConfig,
    market: &MarketParams,
) -> Result<SubscriberComparison> {
    let (mono, strat) = rayon::join(
        || solve_monopolistic(queue, market),
        || solve_strategic(queue, market),
    );
    let (n_mono, n_strat) = (mono?.total_subscribers(), strat?.total_subscribers());
    Ok(SubscriberComparison {
        n_mono,
        n_strat,
        strat_exceeds: n_strat > n_mono,
    })
}
