//! User utility and operator profits.

use crate::error::{Error, Result};

/// Economic parameters shared by users and operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Conversion factor from QoS to money.
    pub c: f64,
    /// Delay sensitivity of the network operator's subscribers.
    pub alpha1: f64,
    /// Delay sensitivity of the virtual operator's subscribers.
    pub alpha2: f64,
    /// Fee per VO subscriber paid to the network operator (strategic model only).
    pub delta: f64,
}

impl MarketParams {
    pub fn new(c: f64, alpha1: f64, alpha2: f64, delta: f64) -> Result<Self> {
        let m = Self {
            c,
            alpha1,
            alpha2,
            delta,
        };
        m.validate()?;
        Ok(m)
    }

    /// `alpha = 0` is rejected: the QoS no longer depends on delay and the
    /// subscription equilibrium degenerates.
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParams(format!("c must be > 0, got {}", self.c)));
        }
        for (name, a) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie in (0, 1], got {a}"
                )));
            }
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "delta must be >= 0, got {}",
                self.delta
            )));
        }
        Ok(())
    }

    /// Roles of the two bases exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            alpha1: self.alpha2,
            alpha2: self.alpha1,
            ..*self
        }
    }

    pub fn alpha(&self, class: Class) -> f64 {
        match class {
            Class::No => self.alpha1,
            Class::Vo => self.alpha2,
        }
    }

    /// Highest price that still attracts subscribers: `c mu^alpha`.
    pub fn price_cap(&self, class: Class, mu: f64) -> f64 {
        self.c * mu.powf(self.alpha(class))
    }
}

/// The two subscriber bases, identified by the operator that bills them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    /// Network operator (owns the infrastructure).
    No,
    /// Virtual operator.
    Vo,
}

impl Class {
    pub fn other(self) -> Self {
        match self {
            Class::No => Class::Vo,
            Class::Vo => Class::No,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PricePair {
    pub p1: f64,
    pub p2: f64,
}

impl PricePair {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        if !(p1 >= 0.0 && p2 >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "prices must be >= 0, got ({p1}, {p2})"
            )));
        }
        Ok(Self { p1, p2 })
    }

    pub fn get(&self, class: Class) -> f64 {
        match class {
            Class::No => self.p1,
            Class::Vo => self.p2,
        }
    }

    pub fn with(&self, class: Class, price: f64) -> Self {
        match class {
            Class::No => Self { p1: price, ..*self },
            Class::Vo => Self { p2: price, ..*self },
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            p1: self.p2,
            p2: self.p1,
        }
    }
}

/// Which business model a profit figure belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Baseline,
    Monopolistic,
    Strategic,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Baseline => "baseline",
            Scenario::Monopolistic => "monopolistic",
            Scenario::Strategic => "strategic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfitReport {
    Baseline { pi0: f64 },
    Monopolistic { pi_m: f64 },
    Strategic { pi1: f64, pi2: f64 },
}

impl ProfitReport {
    pub fn scenario(&self) -> Scenario {
        match self {
            ProfitReport::Baseline { .. } => Scenario::Baseline,
            ProfitReport::Monopolistic { .. } => Scenario::Monopolistic,
            ProfitReport::Strategic { .. } => Scenario::Strategic,
        }
    }

    /// Sum over all operators.
    pub fn aggregate(&self) -> f64 {
        match *self {
            ProfitReport::Baseline { pi0 } => pi0,
            ProfitReport::Monopolistic { pi_m } => pi_m,
            ProfitReport::Strategic { pi1, pi2 } => pi1 + pi2,
        }
    }
}

/// `c T^(-alpha) - p`. A non-subscriber gets zero.
pub fn utility(t: f64, alpha: f64, p: f64, c: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("delay must be > 0, got {t}")));
    }
    Ok(c * t.powf(-alpha) - p)
}

pub fn profit_baseline(n1: f64, p1: f64) -> f64 {
    n1 * p1
}

pub fn profit_monopolistic(n1: f64, p1: f64, n2: f64, p2: f64) -> f64 {
    n1 * p1 + n2 * p2
}

/// `(pi1, pi2)` with the per-subscriber fee moving from the VO to the NO.
pub fn profit_strategic(n1: f64, p1: f64, n2: f64, p2: f64, delta: f64) -> (f64, f64) {
    (n1 * p1 + n2 * delta, n2 * (p2 - delta))
}
