//! Constructive demonstration that the subgroup estimands are not
//! identified: two populations that generate identical outcome-and-receipt
//! distributions under every cluster assignment, yet disagree on a chosen
//! subgroup estimand by a prescribed amount.
//!
//! The construction swaps the compliance types of two units in one cluster
//! while keeping each unit's outcome tables attached to its position. Two
//! equality constraints on the tables make the realized within-cluster
//! data multisets coincide arm by arm; one strict inequality moves the
//! target estimand.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::population::{Cluster, ComplianceType, Individual, OutcomeMode, Population};
use crate::randomize::{enumerate_assignments, realize, Design, ObservedTrial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpossibilityTarget {
    TotalEffectCompliers,
    SpilloverAlwaysTakers,
    SpilloverNeverTakers,
}

impl ImpossibilityTarget {
    pub fn label(self) -> &'static str {
        match self {
            ImpossibilityTarget::TotalEffectCompliers => "total effect on compliers",
            ImpossibilityTarget::SpilloverAlwaysTakers => "spillover on always-takers",
            ImpossibilityTarget::SpilloverNeverTakers => "spillover on never-takers",
        }
    }
}

/// A counterexample pair: same observable law, different estimand.
#[derive(Debug, Clone)]
pub struct CounterexamplePair {
    pub target: ImpossibilityTarget,
    pub pop_a: Population,
    pub pop_b: Population,
    /// the sum-scale estimand difference the construction installs (b - a)
    pub intended_gap: f64,
}

fn random_table(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let y0 = (0..n).map(|_| rng.gen::<f64>()).collect();
    let y1 = (0..n).map(|_| rng.gen::<f64>()).collect();
    (y0, y1)
}

/// Build the pair on real-valued outcomes. `cluster_sizes[0]` hosts the
/// swapped units and must be at least 2; every cluster needs at least one
/// unit. `delta` is the estimand gap to install (nonzero, finite).
pub fn build_counterexample(
    target: ImpossibilityTarget,
    cluster_sizes: &[usize],
    delta: f64,
    seed: u64,
) -> Result<CounterexamplePair> {
    if cluster_sizes.len() < 2 {
        return Err(Error::invalid("need at least 2 clusters"));
    }
    if cluster_sizes[0] < 2 {
        return Err(Error::invalid(
            "first cluster must have at least 2 units to host the swap",
        ));
    }
    if cluster_sizes.contains(&0) {
        return Err(Error::invalid("empty cluster"));
    }
    if !delta.is_finite() || delta == 0.0 {
        return Err(Error::invalid("gap must be finite and nonzero"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let n1 = cluster_sizes[0];
    let (mut t1_y0, mut t1_y1) = random_table(&mut rng, n1);
    let (mut t2_y0, mut t2_y1) = random_table(&mut rng, n1);

    // Types of the two swapped positions (first population's order).
    let (type0, type1) = match target {
        ImpossibilityTarget::TotalEffectCompliers
        | ImpossibilityTarget::SpilloverAlwaysTakers => {
            (ComplianceType::AlwaysTaker, ComplianceType::Complier)
        }
        ImpossibilityTarget::SpilloverNeverTakers => {
            (ComplianceType::NeverTaker, ComplianceType::Complier)
        }
    };

    match target {
        ImpossibilityTarget::TotalEffectCompliers => {
            // distribution: under assignment both receive at 1 treated peer;
            // without assignment the taker shows y1[0] while the complier
            // shows y0[1], so those two cells must agree across tables
            t2_y1[0] = t1_y1[0];
            t2_y0[1] = t1_y0[1];
            // the complier contrast reads y1[1] - y0[1]; shifting whose
            // table plays the complier role moves the estimand by delta
            t1_y1[1] = t2_y1[1] + delta;
        }
        ImpossibilityTarget::SpilloverAlwaysTakers => {
            t2_y1[0] = t1_y1[0];
            t2_y0[1] = t1_y0[1];
            // taker contrast y1[1] - y1[0]: population b's taker is table 2
            t2_y1[1] = t1_y1[1] + delta;
        }
        ImpossibilityTarget::SpilloverNeverTakers => {
            // under assignment the never-taker shows y0[1], the complier
            // y1[0]; unassigned everyone shows y0[0], identical by position
            t2_y0[1] = t1_y0[1];
            t2_y1[0] = t1_y1[0];
            // never-taker contrast y0[1] - y0[0]
            t1_y0[0] = t2_y0[0] + delta;
        }
    }

    // Filler never-taker tables must be byte-identical across the pair, so
    // draw them once and reuse.
    let fillers: Vec<Individual> = (2..n1)
        .map(|_| {
            let (y0, y1) = random_table(&mut rng, n1);
            Individual {
                compliance: ComplianceType::NeverTaker,
                y0,
                y1,
            }
        })
        .collect();
    let cluster1 = |first: ComplianceType, second: ComplianceType| -> Cluster {
        let mut members = vec![
            Individual {
                compliance: first,
                y0: t1_y0.clone(),
                y1: t1_y1.clone(),
            },
            Individual {
                compliance: second,
                y0: t2_y0.clone(),
                y1: t2_y1.clone(),
            },
        ];
        members.extend(fillers.iter().cloned());
        Cluster { members }
    };

    // Remaining clusters: one complier plus never-takers, shared verbatim.
    let rest: Vec<Cluster> = cluster_sizes[1..]
        .iter()
        .map(|&n| {
            let mut members = Vec::with_capacity(n);
            for i in 0..n {
                let (y0, y1) = random_table(&mut rng, n);
                members.push(Individual {
                    compliance: if i == 0 {
                        ComplianceType::Complier
                    } else {
                        ComplianceType::NeverTaker
                    },
                    y0,
                    y1,
                });
            }
            Cluster { members }
        })
        .collect();

    let assemble = |first: ComplianceType, second: ComplianceType| -> Result<Population> {
        let mut clusters = vec![cluster1(first, second)];
        clusters.extend(rest.iter().cloned());
        Population::new(OutcomeMode::Real, clusters)
    };

    Ok(CounterexamplePair {
        target,
        pop_a: assemble(type0, type1)?,
        pop_b: assemble(type1, type0)?,
        intended_gap: delta,
    })
}

/// Exhaustive comparison of the pair under every assignment of a design.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub target: ImpossibilityTarget,
    pub assignments: u128,
    /// unit-by-unit equality of realized (receipt, outcome) data
    pub indexed_identical: bool,
    /// equality of within-cluster data multisets, the observable law
    pub distribution_identical: bool,
    /// randomized symmetric statistics evaluated on both realizations
    pub statistic_checks: usize,
    pub statistic_mismatches: usize,
    pub estimand_a: f64,
    pub estimand_b: f64,
    pub estimand_gap: f64,
    pub is_counterexample: bool,
}

/// Canonical within-cluster ordering of realized (receipt, outcome) pairs.
/// Two clusters realize the same data multiset iff their canonical forms
/// are identical, bit for bit.
pub fn canonicalize(trial: &ObservedTrial) -> Vec<Vec<(bool, f64)>> {
    trial
        .clusters
        .iter()
        .map(|c| {
            let mut pairs: Vec<(bool, f64)> =
                c.d.iter().copied().zip(c.y.iter().copied()).collect();
            pairs.sort_by(|p, q| p.0.cmp(&q.0).then(p.1.total_cmp(&q.1)));
            pairs
        })
        .collect()
}

fn target_sum(pop: &Population, target: ImpossibilityTarget) -> Result<f64> {
    let e = pop.true_estimands()?;
    Ok(match target {
        ImpossibilityTarget::TotalEffectCompliers => e.te_co_sum,
        ImpossibilityTarget::SpilloverAlwaysTakers => e.pe_at_sum,
        ImpossibilityTarget::SpilloverNeverTakers => e.pe_nt_sum,
    })
}

pub fn verify_counterexample(
    pair: &CounterexamplePair,
    design: &Design,
    cap: u128,
) -> Result<Verdict> {
    let a = &pair.pop_a;
    let b = &pair.pop_b;
    if a.n_clusters() != b.n_clusters()
        || a.clusters
            .iter()
            .zip(&b.clusters)
            .any(|(ca, cb)| ca.size() != cb.size())
    {
        return Err(Error::invalid("pair has mismatched cluster structure"));
    }
    if a.n_clusters() != design.clusters {
        return Err(Error::invalid("design does not match the pair"));
    }
    // the construction only relabels units, so type counts must agree
    for (ca, cb) in a.clusters.iter().zip(&b.clusters) {
        let counts = |c: &Cluster| {
            let mut k = [0usize; 4];
            for m in &c.members {
                k[m.compliance as usize] += 1;
            }
            k
        };
        if counts(ca) != counts(cb) {
            return Err(Error::invalid(
                "pair does not preserve per-cluster type counts",
            ));
        }
    }

    // fixed randomized symmetric statistics, shared across all assignments
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let stats: Vec<[f64; 4]> = (0..50)
        .map(|_| [rng.gen(), rng.gen(), rng.gen(), rng.gen()])
        .collect();
    let eval = |canon: &[Vec<(bool, f64)>], coef: &[f64; 4]| -> f64 {
        let mut total = 0.0;
        for cluster in canon {
            for &(d, y) in cluster {
                let d = if d { 1.0 } else { 0.0 };
                total += coef[0] * d + coef[1] * y + coef[2] * d * y + coef[3] * y * y;
            }
        }
        total
    };

    let mut assignments = 0u128;
    let mut indexed_identical = true;
    let mut distribution_identical = true;
    let mut statistic_mismatches = 0usize;
    for z in enumerate_assignments(design, cap)? {
        assignments += 1;
        let trial_a = realize(a, &z)?;
        let trial_b = realize(b, &z)?;
        if trial_a
            .clusters
            .iter()
            .zip(&trial_b.clusters)
            .any(|(ca, cb)| ca.d != cb.d || ca.y != cb.y)
        {
            indexed_identical = false;
        }
        let canon_a = canonicalize(&trial_a);
        let canon_b = canonicalize(&trial_b);
        if canon_a != canon_b {
            distribution_identical = false;
        }
        for coef in &stats {
            // summed in canonical order, so equal multisets give equal bits
            if eval(&canon_a, coef) != eval(&canon_b, coef) {
                statistic_mismatches += 1;
            }
        }
    }

    let estimand_a = target_sum(a, pair.target)?;
    let estimand_b = target_sum(b, pair.target)?;
    let estimand_gap = estimand_b - estimand_a;
    Ok(Verdict {
        target: pair.target,
        assignments,
        indexed_identical,
        distribution_identical,
        statistic_checks: stats.len() * assignments as usize,
        statistic_mismatches,
        estimand_a,
        estimand_b,
        estimand_gap,
        is_counterexample: distribution_identical && estimand_gap != 0.0,
    })
}
