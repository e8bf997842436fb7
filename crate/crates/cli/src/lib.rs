//! Batch front-end for the slicing market model: single-point evaluation,
//! parameter sweeps written as CSV (with optional SVG plots), region maps and
//! the simulator harness.

// `!(x > 0.0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod error;
pub mod plot;
pub mod run;
pub mod spec;

pub use args::{main_with, Cli};
pub use error::CliError;
pub use run::{execute, run, RunOutput, Table};
pub use spec::{defaults, parse_list, ScenarioKind, Settings, SweepSpec};
