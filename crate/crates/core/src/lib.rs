//! Effort-informed multiquery path planning.
//!
//! A [`Session`] plans a sequence of start/goal queries in one static
//! scenario. Every query rewinds the graph to the first batch of a replayable
//! sample sequence, so early searches stay small, while validated and invalid
//! edges are remembered for the whole session. The search explores cheap to
//! validate edges first until it has a solution and then optimizes cost.

pub mod approximation;
pub mod baselines;
pub mod error;
pub mod planner;
pub mod search;
pub mod space;

pub use baselines::{BaselineConfig, LazyPrmStar, RrtConnect};
pub use error::{ApproximationError, ConfigError, PlanError, SpaceError};
pub use planner::{
    Budget, PlanEvent, PlanResult, PlanStatus, Planner, PlannerConfig, Query, Session, Snapshot,
};
pub use space::{Scenario, State, StateId, ValidationStatus};
