//! Experiment runner for the `subnyq` pipelines: JSON scenario configs,
//! seeded parallel Monte Carlo trials, CSV/JSON artifacts, and the
//! density, mismatch and rate-bound studies.

// `!(a > b)` is deliberate: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod methods;

pub use config::{ExperimentConfig, Scenario};
pub use error::HarnessError;
pub use experiment::{run_experiment, Report, Summary, TrialResult};
pub use methods::{bounds_report, density_convergence, mismatch_sweep, BoundsReport};
