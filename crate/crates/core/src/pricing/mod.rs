//! Stage I: operator pricing anticipating the subscription equilibrium.
//!
//! * [`solve_baseline`]: the network operator alone, closed form.
//! * [`solve_monopolistic`]: the network operator prices both bases.
//! * [`solve_strategic`]: each operator prices its own base; Nash equilibrium
//!   of the best-response maps.

mod baseline;
mod monopolistic;
mod strategic;

pub use baseline::{baseline_optimum, solve_baseline};
pub use monopolistic::{
    monopolistic_profit, solve_monopolistic, solve_monopolistic_with, MonopolisticOptions,
};
pub use strategic::{
    best_response, operator_profit, solve_strategic, solve_strategic_with, verify_nash, BestResponse, NashCheck,
    StrategicOptions,
};

use crate::market::{ProfitReport, Scenario};
use crate::wardrop::WardropOutcome;

/// Interval of prices for which every point passed the Nash verification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceSet {
    pub p1_lo: f64,
    pub p1_hi: f64,
    pub p2_lo: f64,
    pub p2_hi: f64,
}

impl PriceSet {
    pub fn point(p1: f64, p2: f64) -> Self {
        Self {
            p1_lo: p1,
            p1_hi: p1,
            p2_lo: p2,
            p2_hi: p2,
        }
    }

    pub fn include(&mut self, p1: f64, p2: f64) {
        self.p1_lo = self.p1_lo.min(p1);
        self.p1_hi = self.p1_hi.max(p1);
        self.p2_lo = self.p2_lo.min(p2);
        self.p2_hi = self.p2_hi.max(p2);
    }

    /// True when the set has positive extent in some coordinate.
    pub fn is_continuum(&self) -> bool {
        self.p1_hi > self.p1_lo || self.p2_hi > self.p2_lo
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub iterations: usize,
    pub converged: bool,
    /// Bounds of the verified equilibrium set around the selected point.
    pub equilibrium_set: Option<PriceSet>,
    /// Distinct verified non-zero equilibria found before continuum walking.
    pub distinct_equilibria: usize,
    /// Baseline only: `|p_numeric - p_closed|` and `|pi_numeric - pi_closed|`.
    pub numeric_gap: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub scenario: Scenario,
    pub p1: f64,
    /// Absent in the baseline scenario.
    pub p2: Option<f64>,
    pub outcome: WardropOutcome,
    pub profits: ProfitReport,
    pub diagnostics: Diagnostics,
}

impl EquilibriumResult {
    pub fn total_subscribers(&self) -> f64 {
        self.outcome.total()
    }
}
