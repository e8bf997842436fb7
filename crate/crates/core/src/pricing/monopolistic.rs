use crate::error::{Error, Result};
use crate::market::{profit_monopolistic, MarketParams, PricePair, ProfitReport, Scenario};
use crate::queueing::QueueConfig;
use crate::search::{golden_max, tie_tolerance, Maximum};
use crate::wardrop::{equilibrium_counts, region_boundaries, wardrop_duopoly, WardropOutcome};

use super::{Diagnostics, EquilibriumResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonopolisticOptions {
    /// Points per axis of the coarse grid.
    pub grid: usize,
    /// Number of grid local maxima refined.
    pub starts: usize,
    /// Coordinate-refinement stops once both coordinates move less than this.
    pub step_tol: f64,
    pub max_cycles: usize,
}

impl Default for MonopolisticOptions {
    fn default() -> Self {
        Self {
            grid: 201,
            starts: 6,
            step_tol: 1e-7,
            max_cycles: 400,
        }
    }
}

/// `Pi_m` at a price pair, with the subscription equilibrium it induces.
pub fn monopolistic_profit(
    queue: &QueueConfig,
    market: &MarketParams,
    prices: &PricePair,
) -> Result<(f64, WardropOutcome)> {
    let o = wardrop_duopoly(queue, market, prices)?;
    Ok((profit_monopolistic(o.n1, prices.p1, o.n2, prices.p2), o))
}

/// Joint price optimum of the network operator over the box of price caps.
///
/// The profit surface is continuous but kinked along the region boundaries,
/// so a coarse grid locates candidate basins and cyclic golden-section passes
/// refine each one. `delta` plays no role here.
pub fn solve_monopolistic(queue: &QueueConfig, market: &MarketParams) -> Result<EquilibriumResult> {
    solve_monopolistic_with(queue, market, &MonopolisticOptions::default())
}

pub fn solve_monopolistic_with(
    queue: &QueueConfig,
    market: &MarketParams,
    opts: &MonopolisticOptions,
) -> Result<EquilibriumResult> {
    queue.validate()?;
    market.validate()?;
    let caps = [
        market.c * queue.mu.powf(market.alpha1),
        market.c * queue.mu.powf(market.alpha2),
    ];
    let profit = |p1: f64, p2: f64| -> f64 {
        let (_, n1, n2, _) = equilibrium_counts(queue, market, &PricePair { p1, p2 });
        profit_monopolistic(n1, p1, n2, p2)
    };

    let g = opts.grid.max(3);
    let steps = [caps[0] / (g - 1) as f64, caps[1] / (g - 1) as f64];
    let at = |axis: usize, k: usize| {
        if k + 1 == g {
            caps[axis]
        } else {
            k as f64 * steps[axis]
        }
    };
    let mut values = vec![0.0; g * g];
    for i in 0..g {
        for j in 0..g {
            values[i * g + j] = profit(at(0, i), at(1, j));
        }
    }
    let grid_best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    // Grid local maxima (8-neighbourhood), best first; index order breaks ties.
    let mut peaks: Vec<(usize, usize)> = (0..g)
        .flat_map(|i| (0..g).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            let v = values[i * g + j];
            (-1i64..=1).all(|di| {
                (-1i64..=1).all(|dj| {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= g as i64 || nj >= g as i64 {
                        return true;
                    }
                    values[ni as usize * g + nj as usize] <= v
                })
            })
        })
        .collect();
    peaks.sort_by(|a, b| {
        values[b.0 * g + b.1]
            .partial_cmp(&values[a.0 * g + a.1])
            .unwrap()
            .then(a.cmp(b))
    });
    peaks.truncate(opts.starts.max(1));

    let mut best: Option<(PricePair, f64, usize)> = None;
    for &(i, j) in &peaks {
        let (p, v, cycles) = refine(&profit, [at(0, i), at(1, j)], caps, steps, opts);
        let better = match best {
            None => true,
            Some((bp, bv, _)) => {
                let tie = tie_tolerance(bv);
                v > bv + tie || (v >= bv - tie && (p.p1, p.p2) < (bp.p1, bp.p2))
            }
        };
        if better {
            best = Some((p, v, cycles));
        }
    }
    let (mut prices, value, cycles) = best.expect("at least one grid peak");
    if !(value >= grid_best - tie_tolerance(grid_best)) {
        return Err(Error::OptimizerFailure(format!(
            "refinement reached {value} below coarse grid best {grid_best}"
        )));
    }

    // A base without subscribers is quoted its entry price, the smallest
    // price that keeps it out, unless the boundary split costs profit.
    let (pi_m, o) = monopolistic_profit(queue, market, &prices)?;
    let b = region_boundaries(queue, market, &prices);
    let mut quoted = prices;
    if o.n2 == 0.0 && o.n1 > 0.0 && b.p2_hat < prices.p2 {
        quoted.p2 = b.p2_hat;
    } else if o.n1 == 0.0 && o.n2 > 0.0 && b.p1_hat < prices.p1 {
        quoted.p1 = b.p1_hat;
    }
    let (pi_q, _) = monopolistic_profit(queue, market, &quoted)?;
    if pi_q >= pi_m - tie_tolerance(pi_m) {
        prices = quoted;
    }
    let (pi_m, outcome) = monopolistic_profit(queue, market, &prices)?;

    Ok(EquilibriumResult {
        scenario: Scenario::Monopolistic,
        p1: prices.p1,
        p2: Some(prices.p2),
        outcome,
        profits: ProfitReport::Monopolistic { pi_m },
        diagnostics: Diagnostics {
            iterations: cycles,
            converged: cycles < opts.max_cycles,
            ..Diagnostics::default()
        },
    })
}

/// Cyclic coordinate ascent with golden-section line searches inside a
/// window of one grid step around the current point; the window follows the
/// iterate when the optimum sits on its edge.
fn refine(
    profit: &impl Fn(f64, f64) -> f64,
    start: [f64; 2],
    caps: [f64; 2],
    steps: [f64; 2],
    opts: &MonopolisticOptions,
) -> (PricePair, f64, usize) {
    let mut p = start;
    let mut value = profit(p[0], p[1]);
    let mut cycles = 0;
    while cycles < opts.max_cycles {
        cycles += 1;
        let mut moved = 0.0f64;
        for axis in 0..2 {
            let lo = (p[axis] - steps[axis]).max(0.0);
            let hi = (p[axis] + steps[axis]).min(caps[axis]);
            let line = |t: f64| {
                let mut q = p;
                q[axis] = t;
                profit(q[0], q[1])
            };
            let mut cand = golden_max(line, lo, hi, 1e-3 * opts.step_tol);
            for edge in [lo, hi] {
                cand = cand.better(Maximum { x: edge, value: line(edge) }, 0.0);
            }
            if cand.value > value {
                moved = moved.max((cand.x - p[axis]).abs());
                p[axis] = cand.x;
                value = cand.value;
            }
        }
        if moved < opts.step_tol {
            break;
        }
    }
    (PricePair { p1: p[0], p2: p[1] }, value, cycles)
}
