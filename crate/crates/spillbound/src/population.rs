//! Finite study population: who complies, and what outcome each unit shows
//! under its own receipt and each possible count of treated clustermates.
//!
//! A unit's potential outcomes are a table `y(d, k)` where `d` is own
//! receipt and `k` counts treated peers in the same cluster. Outcomes never
//! depend on other clusters or on which particular peers are treated, only
//! on how many.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::CompensatedSum;

/// Joint behavior of receipt under assignment and non-assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplianceType {
    /// takes iff assigned
    Complier,
    /// takes regardless
    AlwaysTaker,
    /// never takes
    NeverTaker,
    /// takes iff not assigned
    Defier,
}

impl ComplianceType {
    /// Receipt as a function of the cluster's assignment.
    pub fn receipt(self, assigned: bool) -> bool {
        match self {
            ComplianceType::Complier => assigned,
            ComplianceType::AlwaysTaker => true,
            ComplianceType::NeverTaker => false,
            ComplianceType::Defier => !assigned,
        }
    }
}

/// Maps the receipt pair (d when assigned, d when unassigned) to a type.
/// Inverse of `receipt` evaluated at both assignments.
pub fn classify(d_if_assigned: bool, d_if_unassigned: bool) -> ComplianceType {
    match (d_if_assigned, d_if_unassigned) {
        (true, false) => ComplianceType::Complier,
        (true, true) => ComplianceType::AlwaysTaker,
        (false, false) => ComplianceType::NeverTaker,
        (false, true) => ComplianceType::Defier,
    }
}

/// Whether outcomes are restricted to {0,1} or free reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeMode {
    Binary,
    Real,
}

/// One unit: compliance type plus a full potential-outcome table.
///
/// `y0[k]` is the outcome without own receipt and `k` treated clustermates;
/// `y1[k]` with own receipt. Both vectors have length equal to the cluster
/// size minus nothing: index k runs 0..n-1 where n is the cluster size,
/// because a unit has at most n-1 treated peers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub compliance: ComplianceType,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
}

impl Individual {
    /// Outcome under own receipt `d` with `k` treated peers.
    pub fn outcome(&self, d: bool, k: usize) -> f64 {
        if d {
            self.y1[k]
        } else {
            self.y0[k]
        }
    }

    /// Non-negative-effects check for this table: y0 nondecreasing in the
    /// peer count, and y1[k1] >= y0[k0] whenever k0 < k1. The second family
    /// reduces to y1[k] >= y0[k-1] because y0 is nondecreasing.
    pub fn nonneg_effects_hold(&self) -> bool {
        let n = self.y0.len();
        for k in 1..n {
            if self.y0[k] < self.y0[k - 1] {
                return false;
            }
            if self.y1[k] < self.y0[k - 1] {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub members: Vec<Individual>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn count(&self, t: ComplianceType) -> usize {
        self.members.iter().filter(|m| m.compliance == t).count()
    }

    /// Receipt vector under this cluster's assignment.
    pub fn natural_receipt(&self, assigned: bool) -> Vec<bool> {
        self.members
            .iter()
            .map(|m| m.compliance.receipt(assigned))
            .collect()
    }

    /// Realized outcome of member `i` under the cluster's assignment:
    /// own receipt from the compliance type, peer count from everyone else's.
    pub fn realized_outcome(&self, i: usize, assigned: bool) -> f64 {
        let d = self.members[i].compliance.receipt(assigned);
        let k = self
            .members
            .iter()
            .enumerate()
            .filter(|(idx, m)| *idx != i && m.compliance.receipt(assigned))
            .count();
        self.members[i].outcome(d, k)
    }
}

/// The whole finite population of clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    #[serde(rename = "outcome_mode")]
    pub mode: OutcomeMode,
    pub clusters: Vec<Cluster>,
}

/// True finite-population quantities, computed from the full outcome tables.
#[derive(Debug, Clone, Serialize)]
pub struct Estimands {
    pub n: usize,
    pub n_co: usize,
    pub n_at: usize,
    pub n_nt: usize,
    /// average assignment effect on the outcome
    pub tau_y: f64,
    /// average assignment effect on receipt
    pub tau_d: f64,
    /// ratio tau_y / tau_d
    pub tau: f64,
    /// per-cluster treated count when assigned (always-takers + compliers)
    pub treated_when_assigned: Vec<usize>,
    /// per-cluster treated count when unassigned (always-takers)
    pub treated_when_unassigned: Vec<usize>,
    pub te_co_sum: f64,
    pub pe_at_sum: f64,
    pub pe_nt_sum: f64,
    /// absent when the subgroup is empty, never zero-filled
    pub te_co_avg: Option<f64>,
    pub pe_at_avg: Option<f64>,
    pub pe_nt_avg: Option<f64>,
}

impl Population {
    pub fn new(mode: OutcomeMode, clusters: Vec<Cluster>) -> Result<Self> {
        let pop = Population { mode, clusters };
        pop.validate()?;
        Ok(pop)
    }

    /// Structural checks: nonempty, table lengths match cluster size,
    /// finite values, {0,1} entries in binary mode.
    pub fn validate(&self) -> Result<()> {
        if self.clusters.is_empty() {
            return Err(Error::invalid("population has no clusters"));
        }
        for (j, cluster) in self.clusters.iter().enumerate() {
            let n = cluster.size();
            if n == 0 {
                return Err(Error::invalid(format!("cluster {j} is empty")));
            }
            for (i, m) in cluster.members.iter().enumerate() {
                if m.y0.len() != n || m.y1.len() != n {
                    return Err(Error::invalid(format!(
                        "cluster {j} member {i}: outcome table length {}x{} does not match cluster size {n}",
                        m.y0.len(),
                        m.y1.len()
                    )));
                }
                for v in m.y0.iter().chain(m.y1.iter()) {
                    if !v.is_finite() {
                        return Err(Error::invalid(format!(
                            "cluster {j} member {i}: non-finite outcome {v}"
                        )));
                    }
                    if self.mode == OutcomeMode::Binary && *v != 0.0 && *v != 1.0 {
                        return Err(Error::invalid(format!(
                            "cluster {j} member {i}: outcome {v} is not binary"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn n_units(&self) -> usize {
        self.clusters.iter().map(Cluster::size).sum()
    }

    pub fn count(&self, t: ComplianceType) -> usize {
        self.clusters.iter().map(|c| c.count(t)).sum()
    }

    /// No defiers anywhere.
    pub fn monotonicity_holds(&self) -> bool {
        self.count(ComplianceType::Defier) == 0
    }

    /// No defiers and no always-takers: nobody takes without assignment.
    pub fn one_sided_holds(&self) -> bool {
        self.monotonicity_holds() && self.count(ComplianceType::AlwaysTaker) == 0
    }

    /// Assignment moves receipt on average. Exact integer test:
    /// tau_d = (compliers - defiers) / n.
    pub fn relevance_holds(&self) -> bool {
        self.count(ComplianceType::Complier) != self.count(ComplianceType::Defier)
    }

    /// Non-negative own and spillover effects for every unit.
    pub fn nonneg_effects_hold(&self) -> bool {
        self.clusters
            .iter()
            .all(|c| c.members.iter().all(Individual::nonneg_effects_hold))
    }

    /// Average assignment effects on outcome and on receipt, from realized
    /// values under cluster-wide assignment vs non-assignment. Defined for
    /// any population, defiers included.
    pub fn true_itt(&self) -> (f64, f64) {
        let n = self.n_units() as f64;
        let mut dy = CompensatedSum::new();
        let mut dd = 0i64;
        for cluster in &self.clusters {
            for i in 0..cluster.size() {
                dy.add(cluster.realized_outcome(i, true) - cluster.realized_outcome(i, false));
                let m = &cluster.members[i];
                dd += m.compliance.receipt(true) as i64 - m.compliance.receipt(false) as i64;
            }
        }
        (dy.total() / n, dd as f64 / n)
    }

    /// Full estimand report. Requires no defiers (the subgroup contrasts are
    /// only defined under monotone receipt) and at least one complier (the
    /// ratio tau needs a nonzero receipt effect).
    pub fn true_estimands(&self) -> Result<Estimands> {
        if !self.monotonicity_holds() {
            return Err(Error::invalid(
                "estimands are defined only without defiers (monotone receipt)",
            ));
        }
        let n_co = self.count(ComplianceType::Complier);
        if n_co == 0 {
            return Err(Error::undefined(
                "tau requires at least one complier (assignment never moves receipt)",
            ));
        }
        let n = self.n_units();
        let n_at = self.count(ComplianceType::AlwaysTaker);
        let n_nt = self.count(ComplianceType::NeverTaker);

        let (tau_y, tau_d) = self.true_itt();

        let mut treated_when_assigned = Vec::with_capacity(self.n_clusters());
        let mut treated_when_unassigned = Vec::with_capacity(self.n_clusters());
        let mut te_co = CompensatedSum::new();
        let mut pe_at = CompensatedSum::new();
        let mut pe_nt = CompensatedSum::new();
        for cluster in &self.clusters {
            let a = cluster.count(ComplianceType::AlwaysTaker);
            let c = cluster.count(ComplianceType::Complier);
            let k1 = a + c;
            treated_when_assigned.push(k1);
            treated_when_unassigned.push(a);
            for m in &cluster.members {
                match m.compliance {
                    // own effect plus the spillover shift from a treated peers to k1-1
                    ComplianceType::Complier => te_co.add(m.y1[k1 - 1] - m.y0[a]),
                    // pure spillover on a unit treated either way
                    ComplianceType::AlwaysTaker => pe_at.add(m.y1[k1 - 1] - m.y1[a - 1]),
                    // pure spillover on a unit treated neither way
                    ComplianceType::NeverTaker => pe_nt.add(m.y0[k1] - m.y0[a]),
                    ComplianceType::Defier => unreachable!(),
                }
            }
        }

        let avg = |sum: f64, count: usize| {
            if count == 0 {
                None
            } else {
                Some(sum / count as f64)
            }
        };
        Ok(Estimands {
            n,
            n_co,
            n_at,
            n_nt,
            tau_y,
            tau_d,
            tau: tau_y / tau_d,
            treated_when_assigned,
            treated_when_unassigned,
            te_co_sum: te_co.total(),
            pe_at_sum: pe_at.total(),
            pe_nt_sum: pe_nt.total(),
            te_co_avg: avg(te_co.total(), n_co),
            pe_at_avg: avg(pe_at.total(), n_at),
            pe_nt_avg: avg(pe_nt.total(), n_nt),
        })
    }
}

/// Right-hand side of the ratio decomposition: average complier effect plus
/// the never-taker and always-taker spillover averages weighted by subgroup
/// size relative to the compliers. Equals tau exactly; the crate asserts
/// this identity as a test rather than assuming it.
pub fn decomposition_rhs(e: &Estimands) -> Result<f64> {
    if e.n_co == 0 {
        return Err(Error::undefined("decomposition requires compliers"));
    }
    let co = e.n_co as f64;
    let mut rhs = e.te_co_avg.expect("n_co > 0 implies the average exists");
    if let Some(at) = e.pe_at_avg {
        rhs += e.n_at as f64 / co * at;
    }
    if let Some(nt) = e.pe_nt_avg {
        rhs += e.n_nt as f64 / co * nt;
    }
    Ok(rhs)
}
