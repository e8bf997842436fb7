//! Closed-form performance model of the shared network.
//!
//! The whole network is a single M/M/1 queue served under Discriminatory
//! Processor Sharing. Packets of the network operator's subscribers carry
//! weight `1 - gamma`, packets of the virtual operator's subscribers carry
//! weight `gamma`. With only one class present the queue is plain M/M/1-PS.

use crate::error::{Error, Result};

/// Relative guard kept between the offered load and the service rate when
/// equilibrium counts have to be clamped (free service saturates the queue).
pub const STABILITY_MARGIN: f64 = 1e-9;

/// Service rate, per-subscriber packet rate and slice weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueConfig {
    /// Service rate in packets/s.
    pub mu: f64,
    /// Packet rate generated by each subscriber, packets/s.
    pub lambda_d: f64,
    /// Weight of the virtual operator's slice; the network operator gets `1 - gamma`.
    pub gamma: f64,
}

impl QueueConfig {
    pub fn new(mu: f64, lambda_d: f64, gamma: f64) -> Result<Self> {
        let cfg = Self {
            mu,
            lambda_d,
            gamma,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::InvalidParams(format!("mu must be > 0, got {}", self.mu)));
        }
        if !(self.lambda_d.is_finite() && self.lambda_d > 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda_d must be > 0, got {}",
                self.lambda_d
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParams(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Same queue with a different slice weight.
    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self { gamma, ..*self }
    }

    /// Classes and weights exchanged.
    pub fn swapped(&self) -> Self {
        self.with_gamma(1.0 - self.gamma)
    }

    /// Largest subscriber total kept by clamping, `mu (1 - eps) / lambda_d`.
    pub fn max_subscribers(&self) -> f64 {
        self.mu * (1.0 - STABILITY_MARGIN) / self.lambda_d
    }
}

/// Subscriber counts of the two bases. Counts are real-valued (fluid limit).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Load {
    pub n1: f64,
    pub n2: f64,
}

impl Load {
    pub fn new(n1: f64, n2: f64) -> Result<Self> {
        if !(n1 >= 0.0 && n2 >= 0.0 && n1.is_finite() && n2.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "subscriber counts must be finite and >= 0, got ({n1}, {n2})"
            )));
        }
        Ok(Self { n1, n2 })
    }

    pub fn total(&self) -> f64 {
        self.n1 + self.n2
    }

    pub fn swapped(&self) -> Self {
        Self {
            n1: self.n2,
            n2: self.n1,
        }
    }
}

/// True iff `lambda_d (n1 + n2) < mu`.
pub fn check_stability(cfg: &QueueConfig, load: &Load) -> bool {
    cfg.lambda_d * (load.n1 + load.n2) < cfg.mu
}

/// Mean packet system times `(T1, T2)` of the two classes under DPS.
///
/// The common factor `1 / (mu - lambda)` is evaluated once and both times are
/// built as `f ± lambda_j * k` with the same correction slope `k`, so that
/// `lambda1 T1 + lambda2 T2 = lambda f` holds up to rounding.
pub fn delay_dps(cfg: &QueueConfig, load: &Load) -> Result<(f64, f64)> {
    let lambda1 = cfg.lambda_d * load.n1;
    let lambda2 = cfg.lambda_d * load.n2;
    let lambda = lambda1 + lambda2;
    if !(lambda < cfg.mu) {
        return Err(Error::UnstableLoad { lambda, mu: cfg.mu });
    }
    let inner = cfg.mu - ((1.0 - cfg.gamma) * lambda1 + cfg.gamma * lambda2);
    if !(inner > 0.0) {
        return Err(Error::DegenerateDenominator { value: inner });
    }
    let f = 1.0 / (cfg.mu - lambda);
    let k = (2.0 * cfg.gamma - 1.0) * f / inner;
    Ok((f + lambda2 * k, f - lambda1 * k))
}

/// Mean packet system time of a single-class M/M/1-PS queue.
pub fn delay_baseline_ps(cfg: &QueueConfig, n1: f64) -> Result<f64> {
    let lambda = cfg.lambda_d * n1;
    if !(lambda < cfg.mu) {
        return Err(Error::UnstableLoad { lambda, mu: cfg.mu });
    }
    Ok(1.0 / (cfg.mu - lambda))
}
