use crate::error::{Error, Result};
use crate::market::{profit_strategic, Class, MarketParams, PricePair, ProfitReport, Scenario};
use crate::queueing::QueueConfig;
use crate::search::{grid_golden_max, tie_tolerance, Maximum};
use crate::wardrop::{
    entry_threshold, entry_threshold_inverse, equilibrium_counts, inverse_delay, wardrop_duopoly,
};

use super::{Diagnostics, EquilibriumResult, PriceSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategicOptions {
    /// Weight kept on the previous price in the alternating iteration.
    pub damping: f64,
    pub max_iterations: usize,
    /// Iteration stops once both prices move less than this.
    pub tolerance: f64,
    /// Starting prices per axis, spread evenly inside the price box.
    pub starts_per_axis: usize,
    /// Grid on which `BR2(BR1(p2)) - p2` is scanned for sign changes.
    pub scan_points: usize,
    /// Unilateral deviations tried per operator during verification.
    pub verify_points: usize,
    /// Largest profit gain a deviation may achieve at an equilibrium.
    pub gain_tolerance: f64,
    /// Price tolerance, as a fraction of the cap, for best-response agreement.
    pub price_tolerance: f64,
    /// Candidates keep iterating until prices move less than this fraction of
    /// the cap; profits are steep at region kinks.
    pub polish_tolerance: f64,
    /// Step of the continuum walk as a fraction of the cap.
    pub walk_step: f64,
    /// Grid points per segment in a best-response search.
    pub br_points: usize,
}

impl Default for StrategicOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            max_iterations: 500,
            tolerance: 1e-8,
            starts_per_axis: 3,
            scan_points: 64,
            verify_points: 401,
            gain_tolerance: 1e-6,
            price_tolerance: 1e-4,
            polish_tolerance: 1e-13,
            walk_step: 1e-3,
            br_points: 17,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub price: f64,
    pub profit: f64,
}

/// Outcome of checking a price pair against unilateral deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NashCheck {
    /// `(|BR1(p2) - p1|, |BR2(p1) - p2|)`.
    pub br_gap: (f64, f64),
    /// Largest profit improvement found for each operator.
    pub max_gain: (f64, f64),
    /// `(pi1, pi2)` at the checked prices.
    pub profits: (f64, f64),
}

impl NashCheck {
    /// No deviation raises either profit by more than `gain_tol`.
    pub fn is_nash(&self, gain_tol: f64) -> bool {
        self.max_gain.0 <= gain_tol && self.max_gain.1 <= gain_tol
    }

    /// Both best responses land within `tol` of the checked prices.
    pub fn reproduces(&self, tol: (f64, f64)) -> bool {
        self.br_gap.0 <= tol.0 && self.br_gap.1 <= tol.1
    }
}

/// Profit of one operator at a price pair: `n1 p1 + n2 delta` for the network
/// operator, `n2 (p2 - delta)` for the virtual operator.
pub fn operator_profit(
    queue: &QueueConfig,
    market: &MarketParams,
    operator: Class,
    prices: &PricePair,
) -> f64 {
    let (_, n1, n2, _) = equilibrium_counts(queue, market, prices);
    let (pi1, pi2) = profit_strategic(n1, prices.p1, n2, prices.p2, market.delta);
    match operator {
        Class::No => pi1,
        Class::Vo => pi2,
    }
}

/// Best price of `operator` against `other_price`, searched over `[0, cap]`.
/// Flat optima resolve to the smallest maximizing price.
pub fn best_response(
    queue: &QueueConfig,
    market: &MarketParams,
    operator: Class,
    other_price: f64,
) -> BestResponse {
    best_response_with(queue, market, operator, other_price, StrategicOptions::default().br_points)
}

fn best_response_with(
    queue: &QueueConfig,
    market: &MarketParams,
    operator: Class,
    other_price: f64,
    points: usize,
) -> BestResponse {
    let (mu, g, c) = (queue.mu, queue.gamma, market.c);
    let own_alpha = market.alpha(operator);
    let other_alpha = market.alpha(operator.other());
    let cap = market.price_cap(operator, mu);
    // Slice weight of the own base and of the other base.
    let (w_own, w_other) = match operator {
        Class::No => (1.0 - g, g),
        Class::Vo => (g, 1.0 - g),
    };
    let z = inverse_delay(other_price, c, other_alpha).min(mu);
    // The profit is smooth between the price at which the other base drops
    // out and the price at which the own base does.
    let other_exit = c * entry_threshold_inverse(z, w_other, mu).powf(own_alpha);
    let own_exit = c * entry_threshold(z, w_own, mu).powf(own_alpha);
    let mut cuts = vec![0.0, cap];
    for b in [other_exit, own_exit] {
        if b.is_finite() && b > 0.0 && b < cap {
            cuts.push(b);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let profit = |p: f64| {
        let prices = match operator {
            Class::No => PricePair { p1: p, p2: other_price },
            Class::Vo => PricePair { p1: other_price, p2: p },
        };
        operator_profit(queue, market, operator, &prices)
    };
    let tol = 1e-12 * cap;
    let mut best = Maximum { x: 0.0, value: profit(0.0) };
    for w in cuts.windows(2) {
        let m = grid_golden_max(profit, w[0], w[1], points, tol);
        best = best.better(m, tie_tolerance(best.value.max(m.value)));
    }
    BestResponse {
        price: best.x,
        profit: best.value,
    }
}

/// Check a price pair against both best responses and a uniform grid of
/// unilateral deviations.
pub fn verify_nash(
    queue: &QueueConfig,
    market: &MarketParams,
    prices: &PricePair,
    opts: &StrategicOptions,
) -> NashCheck {
    let here = |op: Class| operator_profit(queue, market, op, prices);
    let (pi1, pi2) = (here(Class::No), here(Class::Vo));
    let br1 = best_response_with(queue, market, Class::No, prices.p2, opts.br_points);
    let br2 = best_response_with(queue, market, Class::Vo, prices.p1, opts.br_points);
    let gain = |op: Class, base: f64, br: f64| {
        let cap = market.price_cap(op, queue.mu);
        let n = opts.verify_points.max(2);
        (0..n)
            .map(|k| if k + 1 == n { cap } else { cap * k as f64 / (n - 1) as f64 })
            .map(|p| operator_profit(queue, market, op, &prices.with(op, p)))
            .fold(br, f64::max)
            - base
    };
    NashCheck {
        br_gap: ((br1.price - prices.p1).abs(), (br2.price - prices.p2).abs()),
        max_gain: (
            gain(Class::No, pi1, br1.profit).max(0.0),
            gain(Class::Vo, pi2, br2.profit).max(0.0),
        ),
        profits: (pi1, pi2),
    }
}

/// Non-trivial Nash equilibrium of the pricing game between the network
/// operator and the virtual operator.
///
/// Candidates come from damped alternating best responses started on a grid
/// of the price box and from sign changes of the composite map
/// `BR2(BR1(p2)) - p2`, which catches undercutting equilibria that the
/// iteration only creeps towards. Every candidate is verified against
/// unilateral deviations; verified points are extended along the
/// best-response curves to detect a continuum, and the verified point with
/// the largest aggregate profit is returned.
pub fn solve_strategic(queue: &QueueConfig, market: &MarketParams) -> Result<EquilibriumResult> {
    solve_strategic_with(queue, market, &StrategicOptions::default())
}

pub fn solve_strategic_with(
    queue: &QueueConfig,
    market: &MarketParams,
    opts: &StrategicOptions,
) -> Result<EquilibriumResult> {
    queue.validate()?;
    market.validate()?;
    let caps = (
        market.price_cap(Class::No, queue.mu),
        market.price_cap(Class::Vo, queue.mu),
    );
    let br = |op: Class, other: f64| best_response_with(queue, market, op, other, opts.br_points).price;

    let mut candidates: Vec<(PricePair, usize, bool)> = Vec::new();
    let mut trace = Vec::new();
    let k = opts.starts_per_axis.max(1);
    for i in 0..k {
        for j in 0..k {
            let frac = |m: usize| (2 * m + 1) as f64 / (2 * k) as f64;
            let (mut p1, mut p2) = (frac(i) * caps.0, frac(j) * caps.1);
            let mut iterations = 0;
            let mut converged = false;
            let polish = opts.polish_tolerance * caps.0.max(caps.1);
            for k in 1..=2 * opts.max_iterations {
                let n1 = opts.damping * p1 + (1.0 - opts.damping) * br(Class::No, p2);
                let n2 = opts.damping * p2 + (1.0 - opts.damping) * br(Class::Vo, n1);
                let moved = (n1 - p1).abs().max((n2 - p2).abs());
                p1 = n1;
                p2 = n2;
                if !converged {
                    iterations = k;
                    converged = moved < opts.tolerance;
                }
                if moved < polish || (!converged && k >= opts.max_iterations) {
                    break;
                }
            }
            trace.push((p1, p2));
            candidates.push((PricePair { p1, p2 }, iterations, converged));
        }
    }

    let nash = |p: &PricePair| verify_nash(queue, market, p, opts).is_nash(opts.gain_tolerance);

    // Roots of the composite best-response map.
    let composite = |p2: f64| br(Class::Vo, br(Class::No, p2)) - p2;
    let n = opts.scan_points.max(2);
    let grid: Vec<f64> = (0..n).map(|k| caps.1 * k as f64 / (n - 1) as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&p| composite(p)).collect();
    for k in 0..n - 1 {
        let (mut lo, mut hi, mut flo) = (grid[k], grid[k + 1], values[k]);
        if values[k] == 0.0 {
            hi = lo;
        } else if values[k].signum() == values[k + 1].signum() || values[k + 1] == 0.0 {
            continue;
        }
        let mut steps = 0;
        while hi - lo > opts.polish_tolerance * caps.1 && steps < 200 {
            steps += 1;
            let mid = 0.5 * (lo + hi);
            let fm = composite(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
            } else if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let p2 = 0.5 * (lo + hi);
        let p1 = br(Class::No, p2);
        trace.push((p1, p2));
        let root = PricePair { p1, p2 };
        candidates.push((root, steps, true));
        if nash(&root) {
            continue;
        }
        // A narrow equilibrium interval can sit next to the sign change
        // rather than on it: scan the bracket and its neighbours finely.
        let a = grid[k.saturating_sub(1)];
        let b = grid[(k + 2).min(n - 1)];
        let fine = opts.verify_points.max(2);
        for j in 0..fine {
            let p2 = a + (b - a) * j as f64 / (fine - 1) as f64;
            let p = PricePair { p1: br(Class::No, p2), p2 };
            if nash(&p) {
                trace.push((p.p1, p.p2));
                candidates.push((p, steps + j, true));
                break;
            }
        }
    }

    // The virtual operator at break-even: the end point of undercutting wars,
    // which the damped iteration approaches only linearly.
    if market.delta <= caps.1 {
        let p2 = market.delta;
        let p1 = br(Class::No, p2);
        trace.push((p1, p2));
        candidates.push((PricePair { p1, p2 }, 1, true));
    }

    let same = |a: &PricePair, b: &PricePair| {
        (a.p1 - b.p1).abs() <= 1e-6 * caps.0 && (a.p2 - b.p2).abs() <= 1e-6 * caps.1
    };
    let mut verified: Vec<(PricePair, usize, bool)> = Vec::new();
    for (p, it, conv) in &candidates {
        let trivial = p.p1 <= 1e-6 * caps.0 && p.p2 <= 1e-6 * caps.1;
        if trivial || verified.iter().any(|(q, _, _)| same(p, q)) || !nash(p) {
            continue;
        }
        verified.push((*p, *it, *conv));
    }
    if verified.is_empty() {
        return Err(Error::NoEquilibriumFound {
            candidates: candidates.len(),
            trace,
        });
    }
    let distinct = verified.len();

    // Walk each verified point along both best-response curves.
    let aggregate = |p: &PricePair| {
        let (_, n1, n2, _) = equilibrium_counts(queue, market, p);
        let (a, b) = profit_strategic(n1, p.p1, n2, p.p2, market.delta);
        a + b
    };
    let mut sets = Vec::new();
    let mut walked: Vec<(PricePair, usize)> = Vec::new();
    for (start, _, _) in &verified {
        let mut set = PriceSet::point(start.p1, start.p2);
        walked.push((*start, sets.len()));
        for (axis, cap) in [(Class::No, caps.0), (Class::Vo, caps.1)] {
            for dir in [-1.0, 1.0] {
                let mut t = start.get(axis);
                loop {
                    t += dir * opts.walk_step * cap;
                    if !(0.0..=cap).contains(&t) {
                        break;
                    }
                    let p = start.with(axis, t).with(axis.other(), br(axis.other(), t));
                    if !nash(&p) {
                        break;
                    }
                    set.include(p.p1, p.p2);
                    walked.push((p, sets.len()));
                }
            }
        }
        sets.push(set);
    }
    let mut best: Option<(PricePair, f64, usize)> = None;
    for (p, idx) in walked {
        let v = aggregate(&p);
        let better = match &best {
            None => true,
            Some((bp, bv, _)) => {
                let tie = 1e-9 * (1.0 + bv.abs());
                v > bv + tie || (v >= bv - tie && (p.p1, p.p2) < (bp.p1, bp.p2))
            }
        };
        if better {
            best = Some((p, v, idx));
        }
    }
    let (prices, _, idx) = best.expect("verified set is non-empty");
    let (_, iterations, converged) = verified[idx];
    let set = sets[idx];
    let outcome = wardrop_duopoly(queue, market, &prices)?;
    let (pi1, pi2) = profit_strategic(outcome.n1, prices.p1, outcome.n2, prices.p2, market.delta);
    Ok(EquilibriumResult {
        scenario: Scenario::Strategic,
        p1: prices.p1,
        p2: Some(prices.p2),
        outcome,
        profits: ProfitReport::Strategic { pi1, pi2 },
        diagnostics: Diagnostics {
            iterations,
            converged,
            equilibrium_set: Some(set),
            distinct_equilibria: distinct,
            numeric_gap: None,
        },
    })
}
