//! Minimum-time grid planning for variable-speed, curvature-constrained
//! vehicles.
//!
//! The vehicle flies between `v_min` and `v_max` with a lateral acceleration
//! limit `K`, so its tightest turn at speed `v` has radius `v²/K`. A grid
//! lattice of cells and eight headings is searched for the fastest
//! collision-free chain of transitions. Each transition's true cost comes
//! from an expensive maneuver optimizer ([`oracle`]); the lazy planner
//! ([`planner::plan_tstar_eps`]) evaluates as few of them as it can while
//! staying within `(1+ε)` of the optimum.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dubins;
pub mod error;
pub mod gridworld;
pub mod maneuver;
pub mod oracle;
pub mod planner;
pub mod render;
pub mod vehicle;

pub use bounds::BoundKind;
pub use error::{Error, Result};
pub use gridworld::{Configuration, GridMap, Scenario, Transition};
pub use maneuver::{Maneuver, Segment};
pub use planner::{plan_tstar, plan_tstar_eps, PlanResult, PlannerOptions};
pub use vehicle::{VehicleParams, WindVector};
