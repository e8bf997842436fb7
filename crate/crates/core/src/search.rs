//! One-dimensional maximization used by the pricing solvers.

/// Inverse golden ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// An argument/value pair found by a maximizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

impl Maximum {
    /// Keep the better of two candidates. Values within `tie` of each other
    /// count as equal and the smaller argument wins.
    pub fn better(self, other: Maximum, tie: f64) -> Maximum {
        if other.value > self.value + tie {
            other
        } else if self.value > other.value + tie {
            self
        } else if other.x < self.x {
            other
        } else {
            self
        }
    }
}

/// Tie tolerance for comparing profit values of magnitude `v`.
pub fn tie_tolerance(v: f64) -> f64 {
    1e-12 * (1.0 + v.abs())
}

/// Golden-section search for a maximum of `f` on `[a, b]`, assuming `f` is
/// unimodal there. Stops once the bracket is narrower than `tol`. The
/// returned point is the best evaluated, endpoints excluded.
pub fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Maximum {
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f2 > f1 {
        Maximum { x: x2, value: f2 }
    } else {
        Maximum { x: x1, value: f1 }
    };
    while b - a > tol {
        // Ties move the bracket left so flat stretches resolve to smaller x.
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            if x1 == x2 {
                break;
            }
            f1 = f(x1);
            best = best.better(Maximum { x: x1, value: f1 }, 0.0);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            if x1 == x2 {
                break;
            }
            f2 = f(x2);
            best = best.better(Maximum { x: x2, value: f2 }, 0.0);
        }
    }
    best
}

/// Uniform grid over `[a, b]` (endpoints included) followed by golden-section
/// refinement between the neighbours of the best grid point.
pub fn grid_golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, points: usize, tol: f64) -> Maximum {
    let points = points.max(2);
    if b <= a {
        return Maximum { x: a, value: f(a) };
    }
    let step = (b - a) / (points - 1) as f64;
    let at = |k: usize| if k + 1 == points { b } else { a + k as f64 * step };
    let mut best_k = 0;
    let mut best = Maximum { x: a, value: f(a) };
    for k in 1..points {
        let x = at(k);
        let cand = Maximum { x, value: f(x) };
        let next = best.better(cand, tie_tolerance(best.value));
        if next.x != best.x {
            best_k = k;
        }
        best = next;
    }
    let lo = at(best_k.saturating_sub(1));
    let hi = at((best_k + 1).min(points - 1));
    let refined = golden_max(&f, lo, hi, tol);
    best.better(refined, tie_tolerance(best.value))
}
