//! Market equilibria for two operators sharing one network through slicing.
//!
//! The shared infrastructure is an M/M/1 discriminatory processor sharing
//! queue serving the subscribers of a network operator (class 1) and of a
//! virtual operator (class 2). Users subscribe while their utility is
//! positive; operators set prices anticipating that subscription equilibrium.

// `!(x > 0.0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod feasibility;
pub mod market;
pub mod pricing;
pub mod queueing;
pub mod search;
pub mod sim;
pub mod wardrop;

pub use error::{Error, Result};
pub use feasibility::{assess, compare_total_subscribers, FeasibilityReport, SubscriberComparison};
pub use market::{
    profit_baseline, profit_monopolistic, profit_strategic, utility, Class, MarketParams,
    PricePair, ProfitReport, Scenario,
};
pub use pricing::{
    baseline_optimum, best_response, monopolistic_profit, operator_profit, solve_baseline,
    solve_monopolistic, solve_strategic, verify_nash, BestResponse, Diagnostics,
    EquilibriumResult, MonopolisticOptions, NashCheck, PriceSet, StrategicOptions,
};
pub use queueing::{check_stability, delay_baseline_ps, delay_dps, Load, QueueConfig};
pub use sim::{
    simulate_dps, validate_closed_form, ClassEstimate, ClassValidation, Replication, SimConfig,
    SimResult, ValidationReport,
};
pub use wardrop::{
    classify, region_boundaries, region_map, wardrop_baseline, wardrop_duopoly, wardrop_oracle,
    Case, RegionBoundaries, RegionMap, WardropOutcome,
};
