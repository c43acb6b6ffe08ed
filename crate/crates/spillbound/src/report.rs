//! Run configuration, effect-direction normalization, and report assembly.
//!
//! All internal analysis runs in the normalized direction where benefit
//! increases the outcome; when the user declares the opposite coding, the
//! trial is transformed at ingestion (binary: y -> 1-y, real: y -> -y) and
//! signed results are restored at this outermost layer only. Receipt-side
//! quantities (tau_d, compliance rates, subgroup counts) never change sign.

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{BoundSet, PointEstimates};
use crate::inference::{TauSet, TauSetShape};
use crate::randomize::{ObservedCluster, ObservedTrial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EffectDirection {
    /// the outcome is coded so that benefit raises y (analysis identity)
    BeneficialIncreasesY,
    /// benefit lowers y; the engine analyzes the flipped outcome
    BeneficialDecreasesY,
}

impl EffectDirection {
    pub fn flips(self) -> bool {
        matches!(self, EffectDirection::BeneficialDecreasesY)
    }
}

/// Resolved run configuration, echoed verbatim into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub alpha: f64,
    pub direction: EffectDirection,
    pub grid_resolution: usize,
    pub enumeration_cap: u64,
    pub output_format: OutputFormat,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!(
                "alpha {} outside (0,1)",
                self.alpha
            )));
        }
        if self.grid_resolution < 2 {
            return Err(Error::invalid("grid resolution must be at least 2"));
        }
        if self.enumeration_cap == 0 {
            return Err(Error::invalid("enumeration cap must be positive"));
        }
        Ok(())
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            version: env!("CARGO_PKG_VERSION"),
            seed: self.seed,
            alpha: self.alpha,
            direction: self.direction,
            grid_resolution: self.grid_resolution,
            enumeration_cap: self.enumeration_cap,
            output_format: self.output_format,
        }
    }
}

/// Full configuration plus artifact version: enough to reproduce the run.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub version: &'static str,
    pub seed: u64,
    pub alpha: f64,
    pub direction: EffectDirection,
    pub grid_resolution: usize,
    pub enumeration_cap: u64,
    pub output_format: OutputFormat,
}

/// Transform a trial into the normalized direction. Identity when the
/// coding already points the beneficial way.
pub fn normalize_trial(trial: &ObservedTrial, direction: EffectDirection) -> ObservedTrial {
    if !direction.flips() {
        return trial.clone();
    }
    let binary = trial.outcomes_binary();
    ObservedTrial {
        z: trial.z.clone(),
        clusters: trial
            .clusters
            .iter()
            .map(|c| ObservedCluster {
                d: c.d.clone(),
                y: c.y
                    .iter()
                    .map(|&y| if binary { 1.0 - y } else { -y })
                    .collect(),
            })
            .collect(),
    }
}

pub fn restore_value(v: f64, direction: EffectDirection) -> f64 {
    if direction.flips() {
        -v
    } else {
        v
    }
}

/// Negate and swap, so ordering survives restoration.
pub fn restore_interval(lower: f64, upper: f64, direction: EffectDirection) -> (f64, f64) {
    if direction.flips() {
        (-upper, -lower)
    } else {
        (lower, upper)
    }
}

pub fn restore_extent(
    extent: Option<(f64, f64)>,
    direction: EffectDirection,
) -> Option<(f64, f64)> {
    extent.map(|(lo, hi)| restore_interval(lo, hi, direction))
}

/// Mirror a confidence set through zero: rays swap sides, interval
/// endpoints swap. Shapes without finite structure are unchanged.
pub fn restore_tau_set(set: &TauSet, direction: EffectDirection) -> TauSet {
    if !direction.flips() {
        return set.clone();
    }
    let shape = match set.shape {
        TauSetShape::Empty => TauSetShape::Empty,
        TauSetShape::WholeLine => TauSetShape::WholeLine,
        TauSetShape::Point { value } => TauSetShape::Point { value: -value },
        TauSetShape::Interval { lower, upper } => TauSetShape::Interval {
            lower: -upper,
            upper: -lower,
        },
        TauSetShape::LeftRay { upper } => TauSetShape::RightRay { lower: -upper },
        TauSetShape::RightRay { lower } => TauSetShape::LeftRay { upper: -lower },
        TauSetShape::TwoRays {
            left_upper,
            right_lower,
        } => TauSetShape::TwoRays {
            left_upper: -right_lower,
            right_lower: -left_upper,
        },
    };
    TauSet {
        alpha: set.alpha,
        critical_z: set.critical_z,
        shape,
        diagnostic: set.diagnostic.clone(),
    }
}

/// Point estimates with outcome-side signs restored to the user's coding.
#[derive(Debug, Clone, Serialize)]
pub struct RestoredEstimates {
    pub n: usize,
    pub tau_y_hat: f64,
    pub tau_d_hat: f64,
    pub tau_hat: Option<f64>,
    pub p_co_hat: f64,
    pub p_nt_hat: f64,
    pub n_co_hat: f64,
    pub n_nt_hat: f64,
}

pub fn restore_estimates(est: &PointEstimates, direction: EffectDirection) -> RestoredEstimates {
    RestoredEstimates {
        n: est.n,
        tau_y_hat: restore_value(est.tau_y_hat, direction),
        tau_d_hat: est.tau_d_hat,
        tau_hat: est.tau_hat.map(|t| restore_value(t, direction)),
        p_co_hat: est.p_co_hat,
        p_nt_hat: est.p_nt_hat,
        n_co_hat: est.n_co_hat,
        n_nt_hat: est.n_nt_hat,
    }
}

/// Bound intervals restored to the user's coding. Emptiness is decided on
/// the normalized scale and survives the mirroring untouched.
#[derive(Debug, Clone, Serialize)]
pub struct RestoredBounds {
    pub mode: crate::estimate::BoundsMode,
    pub te_lower: f64,
    pub te_upper: f64,
    pub te_empty: bool,
    pub pe_lower: f64,
    pub pe_upper: f64,
    pub pe_empty: bool,
}

pub fn restore_bounds(b: &BoundSet, direction: EffectDirection) -> RestoredBounds {
    let (te_lower, te_upper) = restore_interval(b.te_lower, b.te_upper, direction);
    let (pe_lower, pe_upper) = restore_interval(b.pe_lower, b.pe_upper, direction);
    RestoredBounds {
        mode: b.mode,
        te_lower,
        te_upper,
        te_empty: b.te_empty(),
        pe_lower,
        pe_upper,
        pe_empty: b.pe_empty(),
    }
}
