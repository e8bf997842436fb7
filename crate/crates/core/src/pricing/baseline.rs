use crate::error::Result;
use crate::market::{profit_baseline, MarketParams, ProfitReport, Scenario};
use crate::queueing::QueueConfig;
use crate::search::golden_max;
use crate::wardrop::{wardrop_baseline, Case, WardropOutcome};

use super::{Diagnostics, EquilibriumResult};

/// Closed-form optimum `(p1*, pi0*)` of the network operator serving only
/// its own base over a PS queue.
pub fn baseline_optimum(queue: &QueueConfig, market: &MarketParams) -> (f64, f64) {
    let a = market.alpha1;
    let base = a * queue.mu / (1.0 + a);
    let p = market.c * base.powf(a);
    let pi = market.c / (a * queue.lambda_d) * base.powf(1.0 + a);
    (p, pi)
}

/// Baseline scenario. The closed form is returned; a golden-section search
/// over `[0, c mu^alpha1]` runs alongside and its gap lands in the diagnostics.
pub fn solve_baseline(queue: &QueueConfig, market: &MarketParams) -> Result<EquilibriumResult> {
    queue.validate()?;
    market.validate()?;
    let (p, pi) = baseline_optimum(queue, market);
    let cap = market.c * queue.mu.powf(market.alpha1);
    let numeric = golden_max(
        |p1| profit_baseline(wardrop_baseline(queue, market, p1), p1),
        0.0,
        cap,
        1e-12 * cap,
    );
    let n1 = wardrop_baseline(queue, market, p);
    let outcome = WardropOutcome {
        case: if n1 > 0.0 { Case::II } else { Case::IV },
        n1,
        n2: 0.0,
        residuals: (
            market.c * (queue.mu - queue.lambda_d * n1).powf(market.alpha1) - p,
            f64::NAN,
        ),
        degenerate_split: false,
    };
    Ok(EquilibriumResult {
        scenario: Scenario::Baseline,
        p1: p,
        p2: None,
        outcome,
        profits: ProfitReport::Baseline { pi0: pi },
        diagnostics: Diagnostics {
            iterations: 1,
            converged: true,
            numeric_gap: Some(((numeric.x - p).abs(), (numeric.value - pi).abs())),
            ..Diagnostics::default()
        },
    })
}
