//! Formula-based fractal dimensions of Moran structures.
//!
//! A Moran structure is described level by level: level `k` splits every
//! basic set into `n_k` children with contraction ratios `c_{k,1..n_k}`.
//! This crate evaluates the dimension formulas driven by the pressure roots
//! `s_{k,k+l}` (the unique `s` with `prod_{i=k}^{k+l} sum_j c_{i,j}^s = 1`),
//! checks the structural conditions under which the formula identities are
//! known to hold, and cross-validates against covering-number estimates on
//! 1-D interval realizations.
//!
//! The numeric kernel is generic over the scalar type (see [`Real`]); the
//! aliases below fix `f64`, which is what the CLI and the test suites use.

pub mod conditions;
pub mod dims;
pub mod error;
pub mod geometry;
pub mod num;
pub mod pressure;
pub mod schedule;

pub use error::{Error, Result};
pub use num::Real;

/// `f64` schedule, the default scalar for all shipped tools.
pub type Schedule = schedule::RatioSchedule<f64>;
/// `f64` derived per-level statistics.
pub type Derived = schedule::DerivedSequences<f64>;
/// `f64` pressure grid.
pub type Grid = pressure::PressureGrid<f64>;
/// `f64` truncation plan.
pub type Plan = dims::TruncationPlan<f64>;
/// `f64` condition thresholds.
pub type ConditionConfig = conditions::ConditionConfig<f64>;
/// `f64` verdict bundle.
pub type Verdicts = conditions::VerdictBundle<f64>;
/// `f64` interval realization.
pub type Realization = geometry::Realization<f64>;
