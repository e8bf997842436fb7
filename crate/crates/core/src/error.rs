use thiserror::Error;

/// Errors raised by the queueing model, the equilibrium solvers and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Offered load reaches or exceeds the service rate.
    #[error("unstable load: lambda = {lambda} >= mu = {mu}")]
    UnstableLoad { lambda: f64, mu: f64 },

    /// An inner DPS denominator is not positive. Only reachable through a caller bug.
    #[error("degenerate DPS denominator: {value}")]
    DegenerateDenominator { value: f64 },

    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter struct violates its invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Simulator configuration is unusable.
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    /// The fixed-point oracle did not settle.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        trace: Vec<(f64, f64)>,
    },

    /// Local refinement failed to improve on the coarse grid.
    #[error("optimizer failure: {0}")]
    OptimizerFailure(String),

    /// No non-trivial price pair passed the Nash verification.
    #[error("no non-zero Nash equilibrium found ({candidates} candidates rejected)")]
    NoEquilibriumFound {
        candidates: usize,
        trace: Vec<(f64, f64)>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable identifier for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnstableLoad { .. } => "unstable_load",
            Error::DegenerateDenominator { .. } => "degenerate_denominator",
            Error::Domain(_) => "domain",
            Error::InvalidParams(_) => "invalid_params",
            Error::InvalidConfig(_) => "invalid_config",
            Error::NoConvergence { .. } => "no_convergence",
            Error::OptimizerFailure(_) => "optimizer_failure",
            Error::NoEquilibriumFound { .. } => "no_equilibrium",
        }
    }
}
