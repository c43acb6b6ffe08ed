//! Finite-population simulation, estimation, and inference engine for
//! cluster-randomized trials with unit-level noncompliance and
//! within-cluster interference.
//!
//! The engine works entirely at the cluster level: potential outcomes are
//! indexed by own receipt and the number of treated peers, assignment is
//! randomized over clusters, and all inference is design-based. The
//! estimand layer separates what a trial identifies (the composite ratio)
//! from what it cannot (subgroup effects), with a constructive
//! demonstration of the latter.

// quantile coefficients and frozen test oracles keep every printed digit
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod estimate;
pub mod generate;
pub mod impossibility;
pub mod inference;
pub mod io;
pub mod normal;
pub mod population;
pub mod randomize;
pub mod report;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use population::{Cluster, ComplianceType, Individual, OutcomeMode, Population};
pub use randomize::{Design, ObservedTrial};
