//! Online scheduling of proportionate flexible flow shops of batching
//! machines.
//!
//! Every time value is exact: release dates and processing times are
//! rationals, and the strategies may introduce multiples of √5, so times
//! live in the field ℚ(√5) ([`QTime`]).

#![allow(clippy::result_large_err, clippy::large_enum_variant)]
#![allow(clippy::needless_range_loop)]

pub mod adversary;
pub mod bounds;
pub mod compare;
pub mod engine;
pub mod error;
pub mod gantt;
pub mod model;
pub mod objective;
pub mod oracle;
pub mod strategies;
pub mod time;
pub mod validate;

pub use bounds::{lower_bound_matrix, BoundMatrix};
pub use engine::{simulate, simulate_instance, SimError, SimulationTrace, Strategy};
pub use error::UnsupportedInstance;
pub use model::{BatchAssignment, Instance, ObjectiveKind, Schedule, StageConfig};
pub use objective::{evaluate_objective, ObjectiveError};
pub use oracle::{optimal_permutation_schedule, OracleError};
pub use strategies::StrategyKind;
pub use time::{QTime, Rational};
pub use validate::{validate_instance, validate_schedule, ScheduleReport, ScheduleViolation};
