//! Point estimators for the assignment effects and the ratio estimand, and
//! plug-in partial-identification bounds for the complier total effect (TE)
//! and never-taker spillover effect (PE) under one-sided noncompliance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::randomize::{Design, ObservedTrial};
use crate::stats::CompensatedSum;

/// Horvitz-Thompson style estimates from one observed trial.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointEstimates {
    pub n: usize,
    pub tau_y_hat: f64,
    pub tau_d_hat: f64,
    /// undefined (None), not NaN, when the receipt effect estimate is zero
    pub tau_hat: Option<f64>,
    pub n_co_hat: f64,
    pub n_nt_hat: f64,
    pub p_co_hat: f64,
    pub p_nt_hat: f64,
}

/// Inverse-probability-weighted difference of cluster totals.
///
/// The receipt-effect estimator uses only the treated arm; under one-sided
/// noncompliance the control arm's receipts are structurally zero, so this
/// equals the two-arm difference while staying a direct count.
pub fn point_estimates(trial: &ObservedTrial, design: &Design) -> Result<PointEstimates> {
    if trial.n_clusters() != design.clusters {
        return Err(Error::invalid("trial cluster count does not match design"));
    }
    if trial.n_treated_clusters() != design.treated {
        return Err(Error::invalid(format!(
            "trial has {} treated clusters, design says {}",
            trial.n_treated_clusters(),
            design.treated
        )));
    }
    let n = trial.n_units();
    let j = design.clusters as f64;
    let w_treated = j / design.treated as f64;
    let w_control = j / design.control() as f64;

    let mut tau_y = CompensatedSum::new();
    let mut tau_d = CompensatedSum::new();
    for (&z, cluster) in trial.z.iter().zip(&trial.clusters) {
        if z {
            tau_y.add(w_treated * cluster.y_total());
            tau_d.add(w_treated * cluster.d_total());
        } else {
            tau_y.add(-w_control * cluster.y_total());
        }
    }
    let tau_y_hat = tau_y.total() / n as f64;
    let tau_d_hat = tau_d.total() / n as f64;
    let n_co_hat = n as f64 * tau_d_hat;
    Ok(PointEstimates {
        n,
        tau_y_hat,
        tau_d_hat,
        tau_hat: if tau_d_hat == 0.0 {
            None
        } else {
            Some(tau_y_hat / tau_d_hat)
        },
        n_co_hat,
        n_nt_hat: n as f64 - n_co_hat,
        p_co_hat: n_co_hat / n as f64,
        p_nt_hat: 1.0 - n_co_hat / n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsMode {
    /// real outcomes: only non-negativity and the ratio identity constrain
    General,
    /// binary outcomes add the [0,1] outcome range
    Binary,
}

/// Interval bounds for the two effects. Lower may exceed upper when the
/// inputs contradict the non-negative-effects assumption; that is reported
/// via `te_empty`/`pe_empty`, never clipped away.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundSet {
    pub mode: BoundsMode,
    pub te_lower: f64,
    pub te_upper: f64,
    pub pe_lower: f64,
    pub pe_upper: f64,
}

impl BoundSet {
    pub fn te_empty(&self) -> bool {
        self.te_lower > self.te_upper
    }

    pub fn pe_empty(&self) -> bool {
        self.pe_lower > self.pe_upper
    }
}

fn check_subgroups(n_co: f64, n_nt: f64) -> Result<()> {
    if n_co <= 0.0 {
        return Err(Error::invalid(format!(
            "complier count estimate {n_co} must be positive for bounds"
        )));
    }
    if n_nt <= 0.0 {
        return Err(Error::invalid(format!(
            "never-taker count estimate {n_nt} must be positive for bounds \
             (receipt-rate estimate at or above 1 indicates a data problem)"
        )));
    }
    Ok(())
}

/// Bounds with no outcome-range restriction: the total effect lies between 0
/// and the ratio estimand, the spillover between 0 and the ratio scaled by
/// the complier/never-taker split.
pub fn bounds_general(tau_hat: f64, n_co_hat: f64, n_nt_hat: f64) -> Result<BoundSet> {
    check_subgroups(n_co_hat, n_nt_hat)?;
    Ok(BoundSet {
        mode: BoundsMode::General,
        te_lower: 0.0,
        te_upper: tau_hat,
        pe_lower: 0.0,
        pe_upper: tau_hat * n_co_hat / n_nt_hat,
    })
}

/// Bounds for binary outcomes: each effect is also confined to [0,1], which
/// tightens both ends through the ratio identity.
pub fn bounds_binary(tau_hat: f64, n_co_hat: f64, n_nt_hat: f64) -> Result<BoundSet> {
    check_subgroups(n_co_hat, n_nt_hat)?;
    let ratio = n_co_hat / n_nt_hat;
    Ok(BoundSet {
        mode: BoundsMode::Binary,
        te_lower: (tau_hat - n_nt_hat / n_co_hat).max(0.0),
        te_upper: tau_hat.min(1.0),
        pe_lower: (ratio * (tau_hat - 1.0)).max(0.0),
        pe_upper: (tau_hat * ratio).min(1.0),
    })
}

/// One row of the plot-ready bound surface.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurveRow {
    pub tau: f64,
    pub p_co: f64,
    pub te_lower: f64,
    pub te_upper: f64,
    pub pe_lower: f64,
    pub pe_upper: f64,
}

/// Binary bounds on a grid of compliance rates, one row per (tau, p_co)
/// pair in the given order.
pub fn bound_curves(taus: &[f64], compliance_grid: &[f64]) -> Result<Vec<CurveRow>> {
    for &p in compliance_grid {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!(
                "compliance level {p} must lie strictly inside (0,1)"
            )));
        }
    }
    let mut rows = Vec::with_capacity(taus.len() * compliance_grid.len());
    for &tau in taus {
        for &p in compliance_grid {
            let b = bounds_binary(tau, p, 1.0 - p)?;
            rows.push(CurveRow {
                tau,
                p_co: p,
                te_lower: b.te_lower,
                te_upper: b.te_upper,
                pe_lower: b.pe_lower,
                pe_upper: b.pe_upper,
            });
        }
    }
    Ok(rows)
}
