//! Cluster-level randomization: uniform draws of which clusters get treated,
//! realization of observed trials from a population, and expectations of
//! trial statistics computed two ways (exact enumeration, Monte Carlo).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::population::Population;
use crate::stats::CompensatedSum;

/// Completely randomized cluster design: exactly `treated` of `clusters`
/// clusters are assigned, uniformly over the binomial-coefficient-many sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Design {
    pub clusters: usize,
    pub treated: usize,
}

impl Design {
    pub fn new(clusters: usize, treated: usize) -> Result<Self> {
        if clusters < 2 {
            return Err(Error::invalid("design needs at least two clusters"));
        }
        if treated == 0 || treated >= clusters {
            return Err(Error::invalid(format!(
                "treated count {treated} must be strictly between 0 and {clusters}"
            )));
        }
        Ok(Design { clusters, treated })
    }

    pub fn control(&self) -> usize {
        self.clusters - self.treated
    }

    /// Number of possible assignments, or None when it exceeds u128.
    pub fn assignment_count(&self) -> Option<u128> {
        binomial(self.clusters as u128, self.treated as u128)
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.checked_mul(n - i)?;
        c /= i + 1;
    }
    Some(c)
}

/// One cluster's observed data: receipts and outcomes per unit.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedCluster {
    pub d: Vec<bool>,
    pub y: Vec<f64>,
}

impl ObservedCluster {
    pub fn size(&self) -> usize {
        self.d.len()
    }

    /// Receipt total.
    pub fn d_total(&self) -> f64 {
        self.d.iter().filter(|&&v| v).count() as f64
    }

    /// Outcome total.
    pub fn y_total(&self) -> f64 {
        self.y.iter().sum()
    }
}

/// The observable data of one trial: assignment plus per-cluster data.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedTrial {
    pub z: Vec<bool>,
    pub clusters: Vec<ObservedCluster>,
}

impl ObservedTrial {
    pub fn n_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn n_units(&self) -> usize {
        self.clusters.iter().map(ObservedCluster::size).sum()
    }

    pub fn n_treated_clusters(&self) -> usize {
        self.z.iter().filter(|&&z| z).count()
    }

    /// All outcomes in {0,1}.
    pub fn outcomes_binary(&self) -> bool {
        self.clusters
            .iter()
            .all(|c| c.y.iter().all(|&v| v == 0.0 || v == 1.0))
    }

    /// No receipt in any unassigned cluster.
    pub fn one_sided(&self) -> bool {
        self.z
            .iter()
            .zip(&self.clusters)
            .all(|(&z, c)| z || c.d.iter().all(|&d| !d))
    }
}

/// Uniform draw of an assignment vector with exactly `design.treated` ones.
pub fn sample_assignment(design: &Design, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let picked = rand::seq::index::sample(rng, design.clusters, design.treated);
    let mut z = vec![false; design.clusters];
    for idx in picked {
        z[idx] = true;
    }
    z
}

/// Observed trial implied by a population and an assignment vector.
pub fn realize(pop: &Population, z: &[bool]) -> Result<ObservedTrial> {
    if z.len() != pop.n_clusters() {
        return Err(Error::invalid(format!(
            "assignment length {} does not match cluster count {}",
            z.len(),
            pop.n_clusters()
        )));
    }
    let clusters = pop
        .clusters
        .iter()
        .zip(z)
        .map(|(cluster, &assigned)| ObservedCluster {
            d: cluster.natural_receipt(assigned),
            y: (0..cluster.size())
                .map(|i| cluster.realized_outcome(i, assigned))
                .collect(),
        })
        .collect();
    Ok(ObservedTrial {
        z: z.to_vec(),
        clusters,
    })
}

/// Iterator over all assignments of the design in lexicographic order of the
/// treated index set. Construction fails when the count exceeds `cap`.
pub fn enumerate_assignments(design: &Design, cap: u128) -> Result<AssignmentIter> {
    let count = design
        .assignment_count()
        .ok_or(Error::EnumerationCap {
            combinations: u128::MAX,
            cap,
        })?;
    if count > cap {
        return Err(Error::EnumerationCap {
            combinations: count,
            cap,
        });
    }
    Ok(AssignmentIter {
        clusters: design.clusters,
        indices: (0..design.treated).collect(),
        done: false,
    })
}

pub struct AssignmentIter {
    clusters: usize,
    indices: Vec<usize>,
    done: bool,
}

impl Iterator for AssignmentIter {
    type Item = Vec<bool>;

    fn next(&mut self) -> Option<Vec<bool>> {
        if self.done {
            return None;
        }
        let mut z = vec![false; self.clusters];
        for &i in &self.indices {
            z[i] = true;
        }
        // advance to the next combination
        let m = self.indices.len();
        let mut i = m;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.indices[i] != i + self.clusters - m {
                self.indices[i] += 1;
                for j in (i + 1)..m {
                    self.indices[j] = self.indices[j - 1] + 1;
                }
                break;
            }
        }
        Some(z)
    }
}

/// Expectation of a trial statistic under the design, by full enumeration.
#[derive(Debug, Clone, Copy)]
pub struct ExactExpectation {
    pub value: f64,
    pub assignments: u128,
}

pub fn exact_expectation(
    pop: &Population,
    design: &Design,
    cap: u128,
    mut statistic: impl FnMut(&ObservedTrial) -> f64,
) -> Result<ExactExpectation> {
    if design.clusters != pop.n_clusters() {
        return Err(Error::invalid("design cluster count does not match population"));
    }
    let mut sum = CompensatedSum::new();
    let mut count: u128 = 0;
    for z in enumerate_assignments(design, cap)? {
        let trial = realize(pop, &z)?;
        sum.add(statistic(&trial));
        count += 1;
    }
    Ok(ExactExpectation {
        value: sum.total() / count as f64,
        assignments: count,
    })
}

/// Monte Carlo replication of a trial statistic under the design.
///
/// Replicate r draws its assignment from an independent substream: a ChaCha8
/// generator keyed by `seed` on stream r+1 (stream 0 is left to callers who
/// seed a generator directly, so replicate streams never collide with it).
/// Replicates are therefore order-independent and the result depends only on
/// (seed, replications).
pub fn monte_carlo(
    pop: &Population,
    design: &Design,
    replications: usize,
    seed: u64,
    mut statistic: impl FnMut(&ObservedTrial) -> f64,
) -> Result<MonteCarloRun> {
    if design.clusters != pop.n_clusters() {
        return Err(Error::invalid("design cluster count does not match population"));
    }
    if replications == 0 {
        return Err(Error::invalid("need at least one replication"));
    }
    let mut values = Vec::with_capacity(replications);
    for r in 0..replications {
        let mut rng = replicate_rng(seed, r as u64);
        let z = sample_assignment(design, &mut rng);
        let trial = realize(pop, &z)?;
        values.push(statistic(&trial));
    }
    Ok(MonteCarloRun { values })
}

/// RNG for one replicate: same key, distinct counter stream.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate.wrapping_add(1));
    rng
}

#[derive(Debug, Clone)]
pub struct MonteCarloRun {
    /// statistic values in replicate order
    pub values: Vec<f64>,
}

impl MonteCarloRun {
    pub fn mean(&self) -> f64 {
        crate::stats::mean(&self.values)
    }

    pub fn sd(&self) -> f64 {
        crate::stats::sample_sd(&self.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::toy_a;
    use std::collections::HashMap;

    /// Treated-arm-weighted receipt mean: the receipt-effect estimator for
    /// one-sided trials, used here as a handy nonconstant statistic.
    fn tau_d_hat(trial: &ObservedTrial) -> f64 {
        let j = trial.n_clusters() as f64;
        let m = trial.n_treated_clusters() as f64;
        let n = trial.n_units() as f64;
        trial
            .z
            .iter()
            .zip(&trial.clusters)
            .filter(|(&z, _)| z)
            .map(|(_, c)| c.d_total())
            .sum::<f64>()
            * (j / m)
            / n
    }

    #[test]
    fn design_validation() {
        assert!(Design::new(1, 1).is_err());
        assert!(Design::new(4, 0).is_err());
        assert!(Design::new(4, 4).is_err());
        assert!(Design::new(4, 2).is_ok());
    }

    #[test]
    fn binomial_counts() {
        assert_eq!(Design::new(6, 3).unwrap().assignment_count(), Some(20));
        assert_eq!(Design::new(2, 1).unwrap().assignment_count(), Some(2));
        assert_eq!(
            Design::new(60, 30).unwrap().assignment_count(),
            Some(118_264_581_564_861_424)
        );
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let design = Design::new(5, 2).unwrap();
        let all: Vec<Vec<bool>> = enumerate_assignments(&design, 1_000).unwrap().collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![true, true, false, false, false]);
        assert_eq!(all[1], vec![true, false, true, false, false]);
        assert_eq!(all[9], vec![false, false, false, true, true]);
        for z in &all {
            assert_eq!(z.iter().filter(|&&b| b).count(), 2);
        }
    }

    #[test]
    fn enumeration_cap_enforced() {
        let design = Design::new(30, 15).unwrap();
        match enumerate_assignments(&design, 1_000_000) {
            Err(crate::error::Error::EnumerationCap { combinations, cap }) => {
                assert_eq!(combinations, 155_117_520);
                assert_eq!(cap, 1_000_000);
            }
            other => panic!("expected cap error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn realize_toy_examples() {
        let pop = toy_a();
        let t = realize(&pop, &[true, false]).unwrap();
        assert_eq!(t.clusters[0].d, vec![true, false]);
        assert_eq!(t.clusters[0].y, vec![1.0, 1.0]);
        assert_eq!(t.clusters[1].d, vec![false, false]);
        assert_eq!(t.clusters[1].y, vec![0.0, 0.0]);

        let t = realize(&pop, &[false, true]).unwrap();
        assert_eq!(t.clusters[0].d, vec![false, false]);
        assert_eq!(t.clusters[0].y, vec![0.0, 0.0]);
        assert_eq!(t.clusters[1].d, vec![true, true]);
        assert_eq!(t.clusters[1].y, vec![1.0, 1.0]);
        assert!(t.one_sided());
        assert!(t.outcomes_binary());
    }

    #[test]
    fn assignment_length_checked() {
        assert!(realize(&toy_a(), &[true]).is_err());
    }

    #[test]
    fn sample_assignment_hits_all_sets_uniformly() {
        let design = Design::new(6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let draws = 100_000;
        let mut freq: HashMap<Vec<bool>, usize> = HashMap::new();
        for _ in 0..draws {
            let z = sample_assignment(&design, &mut rng);
            assert_eq!(z.iter().filter(|&&b| b).count(), 3);
            *freq.entry(z).or_default() += 1;
        }
        assert_eq!(freq.len(), 20);
        for (z, count) in freq {
            let p = count as f64 / draws as f64;
            assert!(
                (p - 0.05).abs() < 0.01,
                "assignment {z:?} frequency {p} too far from 1/20"
            );
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let design = Design::new(10, 4).unwrap();
        let seq = |seed: u64| -> Vec<Vec<bool>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..5).map(|_| sample_assignment(&design, &mut rng)).collect()
        };
        assert_eq!(seq(9), seq(9));
        assert_ne!(seq(9), seq(10));
    }

    #[test]
    fn exact_expectation_on_reference_population() {
        let pop = toy_a();
        let design = Design::new(2, 1).unwrap();
        let e = exact_expectation(&pop, &design, 1_000, tau_d_hat).unwrap();
        assert_eq!(e.assignments, 2);
        // assignments give receipt-estimates 1/2 and 1
        assert!((e.value - 0.75).abs() < 1e-15);

        let constant = exact_expectation(&pop, &design, 1_000, |_| 2.5).unwrap();
        assert_eq!(constant.value, 2.5);
    }

    #[test]
    fn monte_carlo_matches_exact_expectation() {
        let pop = toy_a();
        let design = Design::new(2, 1).unwrap();
        let run = monte_carlo(&pop, &design, 100_000, 11, tau_d_hat).unwrap();
        assert!((run.mean() - 0.75).abs() < 0.01);
    }

    #[test]
    fn monte_carlo_is_replicate_deterministic() {
        let pop = toy_a();
        let design = Design::new(2, 1).unwrap();
        let a = monte_carlo(&pop, &design, 50, 5, tau_d_hat).unwrap();
        let b = monte_carlo(&pop, &design, 50, 5, tau_d_hat).unwrap();
        assert_eq!(a.values, b.values);
        // prefix stability: the first r replicates do not depend on the total
        let c = monte_carlo(&pop, &design, 20, 5, tau_d_hat).unwrap();
        assert_eq!(&a.values[..20], &c.values[..]);
        let d = monte_carlo(&pop, &design, 50, 6, tau_d_hat).unwrap();
        assert_ne!(a.values, d.values);
    }
}
