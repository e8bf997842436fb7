//! Users' subscription equilibrium (stage II).
//!
//! With prices fixed, users of each base keep subscribing while their utility
//! is positive. In the fluid limit this settles where every active base has
//! zero utility and every inactive base would have negative utility.
//!
//! Working variable: `x = (p1/c)^(1/alpha1)` is the reciprocal of the delay
//! at which a base-1 user is indifferent (likewise `y` for base 2). A base
//! subscribes at all only when its indifference delay exceeds `1/mu`, i.e.
//! `x <= mu`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market::{utility, MarketParams, PricePair};
use crate::queueing::{delay_dps, Load, QueueConfig, STABILITY_MARGIN};

/// Tolerance used when comparing prices against region boundaries.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Which bases subscribe at equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    /// Both bases subscribe.
    I,
    /// Only the network operator's base.
    II,
    /// Only the virtual operator's base.
    III,
    /// Nobody subscribes.
    IV,
}

impl Case {
    pub fn as_str(&self) -> &'static str {
        match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
        }
    }

    /// Label after exchanging the two bases.
    pub fn swapped(&self) -> Self {
        match self {
            Case::II => Case::III,
            Case::III => Case::II,
            c => *c,
        }
    }

    pub fn active(&self) -> (bool, bool) {
        match self {
            Case::I => (true, true),
            Case::II => (true, false),
            Case::III => (false, true),
            Case::IV => (false, false),
        }
    }

    fn from_active(n1_active: bool, n2_active: bool) -> Self {
        match (n1_active, n2_active) {
            (true, true) => Case::I,
            (true, false) => Case::II,
            (false, true) => Case::III,
            (false, false) => Case::IV,
        }
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WardropOutcome {
    pub case: Case,
    pub n1: f64,
    pub n2: f64,
    /// Utilities `(U1, U2)` of a marginal user of each base at the returned load.
    pub residuals: (f64, f64),
    /// Set when only the total is pinned down (plain PS with equal
    /// indifference delays) and the split was chosen by the tie rule.
    pub degenerate_split: bool,
}

impl WardropOutcome {
    pub fn total(&self) -> f64 {
        self.n1 + self.n2
    }

    pub fn load(&self) -> Load {
        Load {
            n1: self.n1,
            n2: self.n2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionBoundaries {
    /// Largest `p1` at which base 1 still subscribes next to base 2 at `p2`.
    pub p1_hat: f64,
    /// Largest `p2` at which base 2 still subscribes next to base 1 at `p1`.
    pub p2_hat: f64,
    pub p1_cap: f64,
    pub p2_cap: f64,
}

/// `(p/c)^(1/alpha)`.
pub(crate) fn inverse_delay(p: f64, c: f64, alpha: f64) -> f64 {
    (p / c).powf(1.0 / alpha)
}

/// Base-2 entry threshold in `y` units given base 1 alone at `x`:
/// a marginal base-2 user sees delay `1 / threshold`.
pub(crate) fn entry_threshold(x: f64, gamma: f64, mu: f64) -> f64 {
    let den = (1.0 - gamma) * mu + gamma * x;
    if den == 0.0 {
        // gamma = 1, x = 0: base 2 preempts base 1 entirely.
        return mu;
    }
    x * ((1.0 - gamma) * x + gamma * mu) / den
}

/// Inverse of [`entry_threshold`] in `x` on `[0, mu]`: the `x` at which a
/// base-2 user with indifference `y` is exactly marginal.
pub(crate) fn entry_threshold_inverse(y: f64, gamma: f64, mu: f64) -> f64 {
    // (1-g) x^2 + g (mu - y) x - (1-g) mu y = 0, positive root.
    let a = 1.0 - gamma;
    if a == 0.0 {
        return 0.0;
    }
    let b = gamma * (mu - y);
    let disc = b * b + 4.0 * a * a * mu * y;
    let root = disc.sqrt();
    // Stable form for b > 0.
    if b > 0.0 {
        2.0 * a * mu * y / (b + root)
    } else {
        (root - b) / (2.0 * a)
    }
}

/// Baseline single-class equilibrium: `(mu - (p1/c)^(1/alpha1)) / lambda_d`,
/// zero above the price cap, clamped below the stability boundary.
pub fn wardrop_baseline(queue: &QueueConfig, market: &MarketParams, p1: f64) -> f64 {
    let cap = market.c * queue.mu.powf(market.alpha1);
    if p1 > cap {
        return 0.0;
    }
    let x = inverse_delay(p1, market.c, market.alpha1);
    ((queue.mu - x).max(0.0) / queue.lambda_d).min(queue.max_subscribers())
}

pub fn region_boundaries(
    queue: &QueueConfig,
    market: &MarketParams,
    prices: &PricePair,
) -> RegionBoundaries {
    let (mu, g, c) = (queue.mu, queue.gamma, market.c);
    let x = inverse_delay(prices.p1, c, market.alpha1);
    let y = inverse_delay(prices.p2, c, market.alpha2);
    RegionBoundaries {
        p1_hat: c * entry_threshold(y, 1.0 - g, mu).powf(market.alpha1),
        p2_hat: c * entry_threshold(x, g, mu).powf(market.alpha2),
        p1_cap: c * mu.powf(market.alpha1),
        p2_cap: c * mu.powf(market.alpha2),
    }
}

/// Classify a price pair by the region conditions. Ties go to the case with
/// more active bases.
pub fn classify(queue: &QueueConfig, market: &MarketParams, prices: &PricePair) -> Case {
    let b = region_boundaries(queue, market, prices);
    let le = |p: f64, bound: f64, scale: f64| p <= bound + BOUNDARY_TOL * scale;
    let in1 = le(prices.p1, b.p1_cap, b.p1_cap);
    let in2 = le(prices.p2, b.p2_cap, b.p2_cap);
    match (in1, in2) {
        (false, false) => Case::IV,
        (false, true) => Case::III,
        (true, false) => Case::II,
        (true, true) => {
            let ok1 = le(prices.p1, b.p1_hat, b.p1_cap);
            let ok2 = le(prices.p2, b.p2_hat, b.p2_cap);
            match (ok1, ok2) {
                (true, true) => Case::I,
                (_, false) => Case::II,
                (false, true) => Case::III,
            }
        }
    }
}

/// Closed-form equilibrium for the two-base model.
pub fn wardrop_duopoly(
    queue: &QueueConfig,
    market: &MarketParams,
    prices: &PricePair,
) -> Result<WardropOutcome> {
    queue.validate()?;
    market.validate()?;
    if !(prices.p1 >= 0.0 && prices.p2 >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "prices must be >= 0, got ({}, {})",
            prices.p1, prices.p2
        )));
    }
    let (case, n1, n2, degenerate) = equilibrium_counts(queue, market, prices);
    let residuals = residuals(queue, market, prices, n1, n2);
    Ok(WardropOutcome {
        case,
        n1,
        n2,
        residuals,
        degenerate_split: degenerate,
    })
}

/// Case and clamped counts without residuals or parameter validation; the
/// hot path of the pricing solvers.
pub(crate) fn equilibrium_counts(
    queue: &QueueConfig,
    market: &MarketParams,
    prices: &PricePair,
) -> (Case, f64, f64, bool) {
    let case = classify(queue, market, prices);
    let (n1, n2, degenerate) = case_counts(queue, market, prices, case);
    let (n1, n2) = clamp_total(queue, n1, n2);
    (case, n1, n2, degenerate)
}

/// Subscriber counts of a classified price pair, before clamping.
fn case_counts(
    queue: &QueueConfig,
    market: &MarketParams,
    prices: &PricePair,
    case: Case,
) -> (f64, f64, bool) {
    let (mu, g, ld) = (queue.mu, queue.gamma, queue.lambda_d);
    let x = inverse_delay(prices.p1, market.c, market.alpha1).min(mu);
    let y = inverse_delay(prices.p2, market.c, market.alpha2).min(mu);
    match case {
        Case::IV => (0.0, 0.0, false),
        Case::II => ((mu - x).max(0.0) / ld, 0.0, false),
        Case::III => (0.0, (mu - y).max(0.0) / ld, false),
        Case::I => {
            let (l1, l2, degenerate) = interior_loads(x, y, g, mu);
            (l1.max(0.0) / ld, l2.max(0.0) / ld, degenerate)
        }
    }
}

/// Packet rates `(lambda1, lambda2)` with both bases indifferent.
fn interior_loads(x: f64, y: f64, g: f64, mu: f64) -> (f64, f64, bool) {
    if x == 0.0 && y == 0.0 {
        // Both bases free: the queue saturates, split by slice weight.
        return ((1.0 - g) * mu, g * mu, true);
    }
    if g == 0.5 && (x - y).abs() <= BOUNDARY_TOL * mu {
        // Plain PS with a common indifference delay: only the total is fixed.
        let total = mu - 0.5 * (x + y);
        return (0.5 * total, 0.5 * total, true);
    }
    if g == 0.0 {
        // Strict priority to base 1.
        return (mu - x, x - mu * y / x, false);
    }
    if g == 1.0 {
        return (y - mu * x / y, mu - y, false);
    }
    let d1 = g * x - (1.0 - g) * y;
    let d2 = g * y - (1.0 - g) * x;
    let cross = x * y / d1;
    (cross - mu * x / d2, mu * y / d2 - cross, false)
}

fn clamp_total(queue: &QueueConfig, n1: f64, n2: f64) -> (f64, f64) {
    let max = queue.max_subscribers();
    let total = n1 + n2;
    if total > max {
        let s = max / total;
        (n1 * s, n2 * s)
    } else {
        (n1, n2)
    }
}

fn residuals(
    queue: &QueueConfig,
    market: &MarketParams,
    prices: &PricePair,
    n1: f64,
    n2: f64,
) -> (f64, f64) {
    match delay_dps(queue, &Load { n1, n2 }) {
        Ok((t1, t2)) => (
            utility(t1, market.alpha1, prices.p1, market.c).unwrap_or(f64::NAN),
            utility(t2, market.alpha2, prices.p2, market.c).unwrap_or(f64::NAN),
        ),
        Err(_) => (f64::NAN, f64::NAN),
    }
}

/// Case labels (and counts) over a price grid. Rows follow `p1_grid`,
/// columns follow `p2_grid`.
#[derive(Debug, Clone)]
pub struct RegionMap {
    pub p1_grid: Vec<f64>,
    pub p2_grid: Vec<f64>,
    pub cells: Vec<WardropOutcome>,
}

impl RegionMap {
    pub fn get(&self, i1: usize, i2: usize) -> &WardropOutcome {
        &self.cells[i1 * self.p2_grid.len() + i2]
    }

    /// `(p1, p2, outcome)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, &WardropOutcome)> + '_ {
        let cols = self.p2_grid.len();
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, o)| (self.p1_grid[k / cols], self.p2_grid[k % cols], o))
    }
}

pub fn region_map(
    queue: &QueueConfig,
    market: &MarketParams,
    p1_grid: &[f64],
    p2_grid: &[f64],
) -> Result<RegionMap> {
    for (name, grid) in [("p1", p1_grid), ("p2", p2_grid)] {
        if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams(format!(
                "{name} grid must be non-empty and strictly increasing"
            )));
        }
    }
    let rows: Result<Vec<Vec<WardropOutcome>>> = p1_grid
        .par_iter()
        .map(|&p1| {
            p2_grid
                .iter()
                .map(|&p2| wardrop_duopoly(queue, market, &PricePair { p1, p2 }))
                .collect()
        })
        .collect();
    Ok(RegionMap {
        p1_grid: p1_grid.to_vec(),
        p2_grid: p2_grid.to_vec(),
        cells: rows?.into_iter().flatten().collect(),
    })
}

/// Equilibrium computed from the delay and utility functions alone.
///
/// Each base's reaction (the count that zeroes its utility given the other
/// base, or zero) is found by bisection; utility is decreasing in the own
/// count, so the reaction is well defined. Composing the two reactions gives
/// an increasing map of `n1`, whose fixed point is again bracketed by
/// bisection.
pub fn wardrop_oracle(
    queue: &QueueConfig,
    market: &MarketParams,
    prices: &PricePair,
) -> Result<WardropOutcome> {
    queue.validate()?;
    market.validate()?;
    let oracle = Oracle {
        queue,
        market,
        prices,
    };
    let n_max = queue.mu / queue.lambda_d;
    let mut trace = Vec::new();

    let gap = |n1: f64| {
        let n2 = oracle.reaction2(n1);
        oracle.reaction1(n2) - n1
    };
    let (mut lo, mut hi) = (0.0, n_max);
    let n1 = if gap(0.0) <= 0.0 {
        0.0
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if gap(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            trace.push((mid, oracle.reaction2(mid)));
        }
        lo
    };
    let n2 = oracle.reaction2(n1);
    let (n1, n2) = clamp_total(queue, n1, n2);

    let active_tol = 1e-9 * n_max;
    let case = Case::from_active(n1 > active_tol, n2 > active_tol);
    let (u1, u2) = residuals(queue, market, prices, n1, n2);
    // Complementarity check at a scale that tolerates the bisection width.
    let tol = 1e-7 * market.c.max(prices.p1).max(prices.p2);
    let violated = |active: bool, u: f64| {
        if prices.p1 == 0.0 || prices.p2 == 0.0 {
            return false;
        }
        u.is_nan() || if active { u.abs() > tol } else { u > tol }
    };
    if violated(n1 > active_tol, u1) || violated(n2 > active_tol, u2) {
        return Err(Error::NoConvergence {
            iterations: trace.len(),
            residual: u1.abs().max(u2.abs()),
            trace,
        });
    }
    Ok(WardropOutcome {
        case,
        n1,
        n2,
        residuals: (u1, u2),
        degenerate_split: false,
    })
}

struct Oracle<'a> {
    queue: &'a QueueConfig,
    market: &'a MarketParams,
    prices: &'a PricePair,
}

impl Oracle<'_> {
    fn u1(&self, n1: f64, n2: f64) -> f64 {
        match delay_dps(self.queue, &Load { n1, n2 }) {
            Ok((t1, _)) => self.utility_at(t1, self.market.alpha1, self.prices.p1),
            Err(_) => -self.prices.p1,
        }
    }

    fn u2(&self, n1: f64, n2: f64) -> f64 {
        match delay_dps(self.queue, &Load { n1, n2 }) {
            Ok((_, t2)) => self.utility_at(t2, self.market.alpha2, self.prices.p2),
            Err(_) => -self.prices.p2,
        }
    }

    /// Near saturation the delay can round to zero; its utility is then unbounded.
    fn utility_at(&self, t: f64, alpha: f64, p: f64) -> f64 {
        utility(t, alpha, p, self.market.c).unwrap_or(f64::INFINITY)
    }

    fn reaction1(&self, n2: f64) -> f64 {
        let hi = (self.queue.mu / self.queue.lambda_d - n2).max(0.0);
        zero_crossing(|n1| self.u1(n1, n2), hi)
    }

    fn reaction2(&self, n1: f64) -> f64 {
        let hi = (self.queue.mu / self.queue.lambda_d - n1).max(0.0);
        zero_crossing(|n2| self.u2(n1, n2), hi)
    }
}

/// Largest `n` in `[0, hi)` with `f(n) > 0` for a decreasing `f`; zero if `f(0) <= 0`.
fn zero_crossing(f: impl Fn(f64) -> f64, hi: f64) -> f64 {
    if hi <= 0.0 || f(0.0) <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, hi * (1.0 - 0.1 * STABILITY_MARGIN));
    if f(hi) > 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn queue(gamma: f64) -> QueueConfig {
        QueueConfig::new(1.0, 0.01, gamma).unwrap()
    }

    fn market(a1: f64, a2: f64) -> MarketParams {
        MarketParams::new(1.0, a1, a2, 0.0).unwrap()
    }

    fn pp(p1: f64, p2: f64) -> PricePair {
        PricePair { p1, p2 }
    }

    #[test]
    fn baseline_counts() {
        let q = queue(0.5);
        let m = market(0.6, 0.6);
        assert_eq!(wardrop_baseline(&q, &m, 1.0), 0.0);
        assert_eq!(wardrop_baseline(&q, &m, 1.2), 0.0);
        let p = 0.375f64.powf(0.6);
        assert_abs_diff_eq!(wardrop_baseline(&q, &m, p), 62.5, epsilon = 1e-9);
        let full = wardrop_baseline(&q, &m, 0.0);
        assert!(full < 100.0 && (full - 100.0).abs() <= 1e-6 * 100.0);
    }

    #[test]
    fn boundary_values() {
        let b = region_boundaries(&queue(0.1), &market(0.8, 0.8), &pp(0.5, 0.25));
        assert_abs_diff_eq!(b.p2_hat, 0.2907, epsilon = 1e-4);
        assert_abs_diff_eq!(b.p1_hat, 0.6876, epsilon = 1e-4);
        for g in [0.0, 0.3, 0.5, 1.0] {
            for (a1, a2) in [(0.2, 0.8), (0.6, 0.6)] {
                let b = region_boundaries(&queue(g), &market(a1, a2), &pp(0.3, 0.4));
                assert_eq!(b.p1_cap, 1.0);
                assert_eq!(b.p2_cap, 1.0);
            }
        }
    }

    #[test]
    fn threshold_inverse_roundtrip() {
        for g in [0.0, 0.1, 0.5, 0.9] {
            for x in [0.0, 0.01, 0.3, 0.7, 1.0] {
                let y = entry_threshold(x, g, 1.0);
                let back = entry_threshold_inverse(y, g, 1.0);
                assert_abs_diff_eq!(back, x, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn worked_interior_point() {
        let q = queue(0.1);
        let m = market(0.8, 0.8);
        let o = wardrop_duopoly(&q, &m, &pp(0.5, 0.25)).unwrap();
        assert_eq!(o.case, Case::I);
        assert_abs_diff_eq!(o.n1, 53.06, epsilon = 1e-2);
        assert_abs_diff_eq!(o.n2, 14.49, epsilon = 1e-2);
        let (t1, t2) = delay_dps(&q, &o.load()).unwrap();
        assert_abs_diff_eq!(t1, 2.3784, epsilon = 1e-3);
        assert_abs_diff_eq!(t2, 5.6569, epsilon = 1e-3);
        assert!(o.residuals.0.abs() <= 1e-9 && o.residuals.1.abs() <= 1e-9);
    }

    #[test]
    fn above_caps_is_case_iv() {
        for g in [0.0, 0.1, 0.5, 0.9, 1.0] {
            for (a1, a2) in [(0.2, 0.8), (0.8, 0.8), (1.0, 0.4)] {
                let o = wardrop_duopoly(&queue(g), &market(a1, a2), &pp(1.5, 1.2)).unwrap();
                assert_eq!(o.case, Case::IV);
                assert_eq!((o.n1, o.n2), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn vo_priced_out_is_case_ii() {
        let o = wardrop_duopoly(&queue(0.1), &market(0.8, 0.8), &pp(0.5, 0.5)).unwrap();
        assert_eq!(o.case, Case::II);
        assert_abs_diff_eq!(o.n1, (1.0 - 0.5f64.powf(1.25)) / 0.01, epsilon = 1e-9);
        assert_eq!(o.n2, 0.0);
        assert!(o.residuals.1 < 0.0);
    }

    #[test]
    fn free_no_row_is_case_ii() {
        let q = queue(0.1);
        let m = market(0.8, 0.8);
        for k in 1..=24 {
            let o = wardrop_duopoly(&q, &m, &pp(0.0, k as f64 * 0.05)).unwrap();
            assert_eq!(o.case, Case::II, "p2 = {}", k as f64 * 0.05);
        }
    }

    #[test]
    fn symmetric_ps_splits_total() {
        let q = queue(0.5);
        let m = market(0.6, 0.6);
        let o = wardrop_duopoly(&q, &m, &pp(0.4, 0.4)).unwrap();
        assert_eq!(o.case, Case::I);
        assert!(o.degenerate_split);
        assert_eq!(o.n1, o.n2);
        let total = wardrop_baseline(&q, &m, 0.4);
        assert_abs_diff_eq!(o.total(), total, epsilon = 1e-9);
        let oracle = wardrop_oracle(&q, &m, &pp(0.4, 0.4)).unwrap();
        assert_abs_diff_eq!(oracle.total(), total, epsilon = 1e-6);
    }

    #[test]
    fn priority_limits_have_finite_counts() {
        // gamma = 0 and gamma = 1 take the strict-priority branches.
        for g in [0.0, 1.0] {
            let q = queue(g);
            let m = market(0.6, 0.6);
            for (p1, p2) in [(0.5, 0.4), (0.4, 0.5), (0.9, 0.2), (0.2, 0.9)] {
                let o = wardrop_duopoly(&q, &m, &pp(p1, p2)).unwrap();
                let r = wardrop_oracle(&q, &m, &pp(p1, p2)).unwrap();
                assert_eq!(o.case, r.case, "g={g} p=({p1},{p2})");
                assert_abs_diff_eq!(o.n1, r.n1, epsilon = 1e-6 * o.n1.max(1.0));
                assert_abs_diff_eq!(o.n2, r.n2, epsilon = 1e-6 * o.n2.max(1.0));
            }
        }
    }

    #[test]
    fn zero_prices_saturate() {
        for g in [0.0, 0.3, 0.5, 1.0] {
            let q = queue(g);
            let o = wardrop_duopoly(&q, &market(0.6, 0.8), &pp(0.0, 0.0)).unwrap();
            assert!(o.degenerate_split);
            assert!(o.total() < 100.0 && o.total() > 100.0 * (1.0 - 1e-8));
            assert!(o.residuals.0.is_finite() && o.residuals.1.is_finite());
        }
    }

    #[test]
    fn oracle_matches_examples() {
        let q = queue(0.1);
        let m = market(0.8, 0.8);
        for (p1, p2, case) in [(0.5, 0.25, Case::I), (1.5, 1.2, Case::IV), (0.5, 0.5, Case::II)] {
            let a = wardrop_duopoly(&q, &m, &pp(p1, p2)).unwrap();
            let b = wardrop_oracle(&q, &m, &pp(p1, p2)).unwrap();
            assert_eq!(a.case, case);
            assert_eq!(b.case, case);
            assert_abs_diff_eq!(a.n1, b.n1, epsilon = 1e-6 * a.n1.max(1.0));
            assert_abs_diff_eq!(a.n2, b.n2, epsilon = 1e-6 * a.n2.max(1.0));
        }
    }

    #[test]
    fn region_map_rejects_unsorted_grid() {
        let q = queue(0.1);
        let m = market(0.8, 0.8);
        assert!(region_map(&q, &m, &[0.1, 0.1], &[0.2]).is_err());
        assert!(region_map(&q, &m, &[], &[0.2]).is_err());
    }

    #[test]
    fn region_map_layout() {
        let q = queue(0.1);
        let m = market(0.8, 0.8);
        let grid: Vec<f64> = (0..=24).map(|k| k as f64 * 0.05).collect();
        let map = region_map(&q, &m, &grid, &grid).unwrap();
        assert_eq!(map.cells.len(), 25 * 25);
        assert_eq!(map.get(22, 22).case, Case::IV);
        assert_eq!(map.get(10, 5).case, Case::I);
        for (p1, p2, o) in map.iter() {
            assert_eq!(o.case, classify(&q, &m, &pp(p1, p2)));
        }
    }
}
