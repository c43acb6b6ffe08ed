//! Randomization inference for the ratio estimand: adjusted-outcome test
//! statistic, confidence sets by quadratic inversion (Fieller geometry), the
//! simultaneous confidence region for the pair (never-taker spillover,
//! complier total effect), and a Monte Carlo pivotality diagnostic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::point_estimates;
use crate::normal::{normal_cdf, normal_quantile};
use crate::population::Population;
use crate::randomize::{realize, replicate_rng, sample_assignment, Design, ObservedTrial};
use crate::stats::{ks_distance, mean, sample_sd};

/// Per-cluster totals split by arm. A_j(tau0) = Y_j - tau0 * D_j is affine
/// in tau0 with slope -D_j, which is what makes the inversion a quadratic.
#[derive(Debug, Clone)]
pub struct ArmTotals {
    /// (outcome total, receipt total) for each treated cluster
    pub treated: Vec<(f64, f64)>,
    /// same for each control cluster
    pub control: Vec<(f64, f64)>,
}

pub fn arm_totals(trial: &ObservedTrial) -> ArmTotals {
    let mut treated = Vec::new();
    let mut control = Vec::new();
    for (&z, c) in trial.z.iter().zip(&trial.clusters) {
        let pair = (c.y_total(), c.d_total());
        if z {
            treated.push(pair);
        } else {
            control.push(pair);
        }
    }
    ArmTotals { treated, control }
}

/// Outcome of evaluating the test statistic at one hypothesized ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestOutcome {
    Defined { t: f64 },
    /// all adjusted outcomes constant within both arms; the statistic is
    /// 0/0 or c/0 and must be reported as such, not as a number
    ZeroVariance { numerator: f64 },
}

fn check_arm_sizes(design: &Design) -> Result<()> {
    if design.treated < 2 || design.control() < 2 {
        return Err(Error::invalid(format!(
            "variance estimation needs at least 2 clusters per arm, got {} treated / {} control",
            design.treated,
            design.control()
        )));
    }
    Ok(())
}

/// Difference of arm means of adjusted outcomes over the estimated standard
/// error, at hypothesized ratio `tau0`.
pub fn test_statistic(trial: &ObservedTrial, design: &Design, tau0: f64) -> Result<TestOutcome> {
    check_arm_sizes(design)?;
    if trial.n_clusters() != design.clusters || trial.n_treated_clusters() != design.treated {
        return Err(Error::invalid("trial does not match design"));
    }
    let arms = arm_totals(trial);
    let adj = |v: &[(f64, f64)]| -> Vec<f64> { v.iter().map(|&(y, d)| y - tau0 * d).collect() };
    let a_t = adj(&arms.treated);
    let a_c = adj(&arms.control);
    let m = a_t.len() as f64;
    let mc = a_c.len() as f64;
    let mean_t = a_t.iter().sum::<f64>() / m;
    let mean_c = a_c.iter().sum::<f64>() / mc;
    let ss_t: f64 = a_t.iter().map(|a| (a - mean_t) * (a - mean_t)).sum();
    let ss_c: f64 = a_c.iter().map(|a| (a - mean_c) * (a - mean_c)).sum();
    let variance = ss_t / (m * (m - 1.0)) + ss_c / (mc * (mc - 1.0));
    let numerator = mean_t - mean_c;
    if variance == 0.0 {
        Ok(TestOutcome::ZeroVariance { numerator })
    } else {
        Ok(TestOutcome::Defined {
            t: numerator / variance.sqrt(),
        })
    }
}

/// The set of hypothesized ratios the test does not reject, labeled by its
/// geometry. Rays and the whole line arise when the receipt effect is weak
/// relative to its sampling noise (the classic weak-instrument shapes).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum TauSetShape {
    Empty,
    Point { value: f64 },
    Interval { lower: f64, upper: f64 },
    /// (-inf, upper]
    LeftRay { upper: f64 },
    /// [lower, +inf)
    RightRay { lower: f64 },
    /// (-inf, left_upper] U [right_lower, +inf)
    TwoRays { left_upper: f64, right_lower: f64 },
    WholeLine,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauSet {
    pub alpha: f64,
    /// normal critical value the set was inverted at
    pub critical_z: f64,
    #[serde(flatten)]
    pub shape: TauSetShape,
    pub diagnostic: Option<String>,
}

impl TauSet {
    pub fn contains(&self, tau0: f64) -> bool {
        match self.shape {
            TauSetShape::Empty => false,
            TauSetShape::Point { value } => tau0 == value,
            TauSetShape::Interval { lower, upper } => lower <= tau0 && tau0 <= upper,
            TauSetShape::LeftRay { upper } => tau0 <= upper,
            TauSetShape::RightRay { lower } => tau0 >= lower,
            TauSetShape::TwoRays {
                left_upper,
                right_lower,
            } => tau0 <= left_upper || tau0 >= right_lower,
            TauSetShape::WholeLine => true,
        }
    }

    /// Maximal intervals composing the set, with infinite ends where open.
    pub fn components(&self) -> Vec<(f64, f64)> {
        match self.shape {
            TauSetShape::Empty => vec![],
            TauSetShape::Point { value } => vec![(value, value)],
            TauSetShape::Interval { lower, upper } => vec![(lower, upper)],
            TauSetShape::LeftRay { upper } => vec![(f64::NEG_INFINITY, upper)],
            TauSetShape::RightRay { lower } => vec![(lower, f64::INFINITY)],
            TauSetShape::TwoRays {
                left_upper,
                right_lower,
            } => vec![
                (f64::NEG_INFINITY, left_upper),
                (right_lower, f64::INFINITY),
            ],
            TauSetShape::WholeLine => vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    /// Finite boundary points (where the statistic equals the critical value).
    pub fn finite_endpoints(&self) -> Vec<f64> {
        self.components()
            .into_iter()
            .flat_map(|(a, b)| [a, b])
            .filter(|v| v.is_finite())
            .collect()
    }
}

/// Confidence set for the ratio estimand by inverting T(tau0)^2 <= z^2.
///
/// Both sides are quadratics in tau0, so the acceptance region is the
/// solution set of A*tau0^2 + B*tau0 + C <= 0 with
///   A = dD^2 - z^2 * Vdd,  B = -2*dY*dD + 2*z^2 * Vyd,  C = dY^2 - z^2 * Vyy,
/// where dY, dD are arm-mean differences of cluster totals and Vyy, Vyd, Vdd
/// assemble the per-arm centered sums with the variance weights. A point
/// with zero estimated variance belongs to the set iff the numerator also
/// vanishes there, which the quadratic encodes automatically.
///
/// `alpha` may be 1 (critical value 0): the set degenerates to the single
/// ratio where the numerator vanishes.
pub fn tau_confidence_set(trial: &ObservedTrial, design: &Design, alpha: f64) -> Result<TauSet> {
    check_arm_sizes(design)?;
    if trial.n_clusters() != design.clusters || trial.n_treated_clusters() != design.treated {
        return Err(Error::invalid("trial does not match design"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("alpha {alpha} outside (0,1]")));
    }
    let z = normal_quantile(1.0 - alpha / 2.0);

    let arms = arm_totals(trial);
    let summarize = |v: &[(f64, f64)]| -> (f64, f64, f64, f64, f64) {
        let k = v.len() as f64;
        let ybar = v.iter().map(|p| p.0).sum::<f64>() / k;
        let dbar = v.iter().map(|p| p.1).sum::<f64>() / k;
        let mut syy = 0.0;
        let mut syd = 0.0;
        let mut sdd = 0.0;
        for &(y, d) in v {
            syy += (y - ybar) * (y - ybar);
            syd += (y - ybar) * (d - dbar);
            sdd += (d - dbar) * (d - dbar);
        }
        (ybar, dbar, syy, syd, sdd)
    };
    let (ybar_t, dbar_t, syy_t, syd_t, sdd_t) = summarize(&arms.treated);
    let (ybar_c, dbar_c, syy_c, syd_c, sdd_c) = summarize(&arms.control);
    let m = arms.treated.len() as f64;
    let mc = arms.control.len() as f64;
    let w_t = 1.0 / (m * (m - 1.0));
    let w_c = 1.0 / (mc * (mc - 1.0));

    let dy = ybar_t - ybar_c;
    let dd = dbar_t - dbar_c;

    // z = 0 (alpha = 1): acceptance means the numerator vanishes exactly;
    // the discriminant route would hit rounding, so resolve it directly
    if z == 0.0 {
        let shape = if dd != 0.0 {
            TauSetShape::Point { value: dy / dd }
        } else if dy == 0.0 {
            TauSetShape::WholeLine
        } else {
            TauSetShape::Empty
        };
        return Ok(TauSet {
            alpha,
            critical_z: z,
            shape,
            diagnostic: None,
        });
    }

    let z2 = z * z;
    let a = dd * dd - z2 * (w_t * sdd_t + w_c * sdd_c);
    let b = -2.0 * dy * dd + 2.0 * z2 * (w_t * syd_t + w_c * syd_c);
    let c = dy * dy - z2 * (w_t * syy_t + w_c * syy_c);

    let (shape, diagnostic) = solve_quadratic_inequality(a, b, c);
    Ok(TauSet {
        alpha,
        critical_z: z,
        shape,
        diagnostic,
    })
}

/// Solution set of a*x^2 + b*x + c <= 0 with geometry labels.
fn solve_quadratic_inequality(a: f64, b: f64, c: f64) -> (TauSetShape, Option<String>) {
    if a == 0.0 && b == 0.0 {
        return if c == 0.0 {
            (
                TauSetShape::WholeLine,
                Some("degenerate: statistic is 0/0 at every hypothesized value".into()),
            )
        } else if c < 0.0 {
            (
                TauSetShape::WholeLine,
                Some("degenerate: receipt totals carry no information (constant comparison)".into()),
            )
        } else {
            (
                TauSetShape::Empty,
                Some("degenerate: no hypothesized value reconciles the arms".into()),
            )
        };
    }
    if a == 0.0 {
        let root = -c / b;
        return if b > 0.0 {
            (TauSetShape::LeftRay { upper: root }, None)
        } else {
            (TauSetShape::RightRay { lower: root }, None)
        };
    }

    let disc = b * b - 4.0 * a * c;
    if a > 0.0 {
        if disc < 0.0 {
            (TauSetShape::Empty, None)
        } else if disc == 0.0 {
            (
                TauSetShape::Point {
                    value: -b / (2.0 * a),
                },
                None,
            )
        } else {
            let (r1, r2) = stable_roots(a, b, c, disc);
            (
                TauSetShape::Interval {
                    lower: r1,
                    upper: r2,
                },
                None,
            )
        }
    } else if disc <= 0.0 {
        (TauSetShape::WholeLine, None)
    } else {
        let (r1, r2) = stable_roots(a, b, c, disc);
        (
            TauSetShape::TwoRays {
                left_upper: r1,
                right_lower: r2,
            },
            None,
        )
    }
}

/// Roots by the cancellation-free formula, returned in ascending order.
fn stable_roots(a: f64, b: f64, c: f64, disc: f64) -> (f64, f64) {
    let sq = disc.sqrt();
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * sq);
    // q = 0 forces b = 0 and disc = 0, handled by the tangent case; here
    // disc > 0 guarantees q != 0
    let (r1, r2) = (q / a, c / q);
    if r1 <= r2 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

/// Simultaneous confidence region for (x, y) = (never-taker spillover,
/// complier total effect), as the band {tau_L <= y + r_hat * x <= tau_U}
/// intersected with the unit square. The band's slope is the estimated
/// never-taker/complier ratio, held fixed (conditioned on) by construction.
#[derive(Debug, Clone, Serialize)]
pub struct Region {
    pub alpha: f64,
    pub r_hat: f64,
    pub p_co_hat: f64,
    pub tau_set: TauSet,
    /// tight per-axis ranges of the region inside [0,1]^2; None when empty
    pub x_extent: Option<(f64, f64)>,
    pub y_extent: Option<(f64, f64)>,
}

impl Region {
    /// Membership of one candidate pair.
    pub fn contains(&self, x0: f64, y0: f64) -> bool {
        (0.0..=1.0).contains(&x0)
            && (0.0..=1.0).contains(&y0)
            && self.tau_set.contains(y0 + self.r_hat * x0)
    }

    /// Row-major membership grid over [0,1]^2, `resolution` points per axis.
    pub fn raster(&self, resolution: usize) -> Result<RegionRaster> {
        if resolution < 2 {
            return Err(Error::invalid("raster needs at least 2 points per axis"));
        }
        let coord = |i: usize| i as f64 / (resolution - 1) as f64;
        let mut members = Vec::with_capacity(resolution * resolution);
        for iy in 0..resolution {
            for ix in 0..resolution {
                members.push(self.contains(coord(ix), coord(iy)));
            }
        }
        Ok(RegionRaster {
            resolution,
            members,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RegionRaster {
    pub resolution: usize,
    /// row-major over (iy, ix)
    pub members: Vec<bool>,
}

impl RegionRaster {
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 / (self.resolution - 1) as f64
    }

    pub fn at(&self, ix: usize, iy: usize) -> bool {
        self.members[iy * self.resolution + ix]
    }
}

/// Tight bounding interval of one region axis, or None when empty.
pub type Extent = Option<(f64, f64)>;

/// Per-axis extent of the band-square intersection: the union over the tau
/// set's components of each component's slice, reported as the tight
/// bounding interval per axis (a two-ray set yields the hull of two slices).
pub fn band_extents(set: &TauSet, r: f64) -> (Extent, Extent) {
    debug_assert!(r > 0.0);
    let mut x: Extent = None;
    let mut y: Extent = None;
    for (lo, hi) in set.components() {
        // slice nonempty iff [lo, hi] meets the band values [0, 1+r]
        if lo > 1.0 + r || hi < 0.0 {
            continue;
        }
        let x_lo = ((lo - 1.0) / r).max(0.0);
        let x_hi = (hi / r).min(1.0);
        let y_lo = (lo - r).max(0.0);
        let y_hi = hi.min(1.0);
        let merge = |acc: &mut Option<(f64, f64)>, lo: f64, hi: f64| {
            *acc = Some(match *acc {
                None => (lo, hi),
                Some((a, b)) => (a.min(lo), b.max(hi)),
            });
        };
        merge(&mut x, x_lo, x_hi);
        merge(&mut y, y_lo, y_hi);
    }
    (x, y)
}

/// Build the simultaneous region from one trial. Requires binary outcomes,
/// one-sided receipt, and an interior compliance-rate estimate.
pub fn simultaneous_region(trial: &ObservedTrial, design: &Design, alpha: f64) -> Result<Region> {
    if !trial.outcomes_binary() {
        return Err(Error::invalid(
            "simultaneous region requires binary outcomes",
        ));
    }
    if !trial.one_sided() {
        return Err(Error::invalid(
            "simultaneous region requires one-sided receipt (control clusters show receipts)",
        ));
    }
    let est = point_estimates(trial, design)?;
    if !(est.p_co_hat > 0.0 && est.p_co_hat < 1.0) {
        return Err(Error::invalid(format!(
            "compliance-rate estimate {} must lie strictly inside (0,1) for the region",
            est.p_co_hat
        )));
    }
    let r_hat = est.p_nt_hat / est.p_co_hat;
    let tau_set = tau_confidence_set(trial, design, alpha)?;
    let (x_extent, y_extent) = band_extents(&tau_set, r_hat);
    Ok(Region {
        alpha,
        r_hat,
        p_co_hat: est.p_co_hat,
        tau_set,
        x_extent,
        y_extent,
    })
}

/// Monte Carlo check that T evaluated at the hypothesized pair behaves like
/// a standard normal draw under the design's assignment distribution.
#[derive(Debug, Clone, Serialize)]
pub struct PivotalityReport {
    pub replications: usize,
    /// replicates with a usable statistic
    pub defined: usize,
    /// replicates lost to boundary compliance estimates or zero variance
    pub undefined: usize,
    pub ks_distance: f64,
    /// fraction of defined replicates with |T| above the alpha critical value
    pub rejection_rate: f64,
    pub mean: f64,
    pub sd: f64,
}

/// Distribution diagnostic for T(tau_hat_{x0,y0}) over assignment draws.
/// The caller asserts the hypothesis; nothing here checks that (x0, y0) are
/// the population's true effects, which is what makes misspecification
/// power studies possible.
pub fn pivotality_check(
    pop: &Population,
    design: &Design,
    x0: f64,
    y0: f64,
    alpha: f64,
    replications: usize,
    seed: u64,
) -> Result<PivotalityReport> {
    check_arm_sizes(design)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha {alpha} outside (0,1)")));
    }
    if replications == 0 {
        return Err(Error::invalid("need at least one replication"));
    }
    let z = normal_quantile(1.0 - alpha / 2.0);
    let mut values = Vec::with_capacity(replications);
    let mut undefined = 0usize;
    for rep in 0..replications {
        let mut rng = replicate_rng(seed, rep as u64);
        let assignment = sample_assignment(design, &mut rng);
        let trial = realize(pop, &assignment)?;
        let est = point_estimates(&trial, design)?;
        if !(est.p_co_hat > 0.0 && est.p_co_hat < 1.0) {
            undefined += 1;
            continue;
        }
        let tau0 = y0 + est.p_nt_hat / est.p_co_hat * x0;
        match test_statistic(&trial, design, tau0)? {
            TestOutcome::Defined { t } => values.push(t),
            TestOutcome::ZeroVariance { .. } => undefined += 1,
        }
    }
    if values.is_empty() {
        return Err(Error::undefined(
            "every replicate produced a degenerate statistic",
        ));
    }
    let rejections = values.iter().filter(|t| t.abs() > z).count();
    Ok(PivotalityReport {
        replications,
        defined: values.len(),
        undefined,
        ks_distance: ks_distance(&values, normal_cdf),
        rejection_rate: rejections as f64 / values.len() as f64,
        mean: mean(&values),
        sd: sample_sd(&values),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_population, PopulationParams};
    use crate::randomize::ObservedCluster;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Trial with given per-cluster (y_total, d_total) as singleton clusters.
    fn trial_from_totals(z: &[bool], totals: &[(f64, f64)]) -> ObservedTrial {
        ObservedTrial {
            z: z.to_vec(),
            clusters: totals
                .iter()
                .map(|&(y, d)| ObservedCluster {
                    d: vec![d != 0.0],
                    y: vec![y],
                })
                .collect(),
        }
    }

    #[test]
    fn worked_statistic_example() {
        // treated adjusted outcomes {0,2}, control {1,3} at tau0 = 0
        let trial = trial_from_totals(
            &[true, false, true, false],
            &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)],
        );
        let design = Design::new(4, 2).unwrap();
        match test_statistic(&trial, &design, 0.0).unwrap() {
            TestOutcome::Defined { t } => {
                assert!((t - (-1.0 / 2.0_f64.sqrt())).abs() < 1e-12, "t = {t}");
            }
            other => panic!("expected defined statistic, got {other:?}"),
        }
    }

    #[test]
    fn constant_adjusted_outcomes_signal_zero_variance() {
        let trial = trial_from_totals(
            &[true, false, true, false],
            &[(1.0, 0.0); 4],
        );
        let design = Design::new(4, 2).unwrap();
        match test_statistic(&trial, &design, 0.0).unwrap() {
            TestOutcome::ZeroVariance { numerator } => assert_eq!(numerator, 0.0),
            other => panic!("expected zero-variance signal, got {other:?}"),
        }
    }

    #[test]
    fn small_arms_rejected() {
        let trial = trial_from_totals(&[true, false], &[(1.0, 1.0), (0.0, 0.0)]);
        let design = Design::new(2, 1).unwrap();
        assert!(test_statistic(&trial, &design, 0.0).is_err());
        assert!(tau_confidence_set(&trial, &design, 0.05).is_err());
    }

    fn simulated_trial(seed: u64, clusters: usize, p_co: f64) -> (ObservedTrial, Design) {
        let params = PopulationParams::one_sided_binary(clusters, 2, 5, p_co);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pop = random_population(&params, &mut rng).unwrap();
        let design = Design::new(clusters, clusters / 2).unwrap();
        let z = sample_assignment(&design, &mut rng);
        (realize(&pop, &z).unwrap(), design)
    }

    #[test]
    fn interval_endpoints_satisfy_defining_equation() {
        let mut intervals_seen = 0;
        for seed in 0..40u64 {
            let (trial, design) = simulated_trial(seed, 12, 0.7);
            let set = tau_confidence_set(&trial, &design, 0.05).unwrap();
            for endpoint in set.finite_endpoints() {
                match test_statistic(&trial, &design, endpoint).unwrap() {
                    TestOutcome::Defined { t } => {
                        assert!(
                            (t.abs() - set.critical_z).abs() < 1e-8,
                            "seed {seed}: |T({endpoint})| = {} vs z = {}",
                            t.abs(),
                            set.critical_z
                        );
                    }
                    TestOutcome::ZeroVariance { .. } => {
                        // boundary coincides with a variance zero; the
                        // quadratic still treats it correctly
                    }
                }
            }
            if matches!(set.shape, TauSetShape::Interval { .. }) {
                intervals_seen += 1;
            }
        }
        assert!(intervals_seen > 20, "only {intervals_seen} interval shapes");
    }

    #[test]
    fn statistic_at_point_estimate_sits_inside_the_interval() {
        for seed in [3u64, 7, 11] {
            let (trial, design) = simulated_trial(seed, 16, 0.8);
            let est = point_estimates(&trial, &design).unwrap();
            let tau_hat = est.tau_hat.expect("receipt effect present");
            let set = tau_confidence_set(&trial, &design, 0.05).unwrap();
            assert!(set.contains(tau_hat), "seed {seed}");
            if let TauSetShape::Interval { lower, upper } = set.shape {
                // the statistic is +z at the lower end, -z at the upper end,
                // crossing zero at the point estimate in between
                let at = |tau0: f64| match test_statistic(&trial, &design, tau0).unwrap() {
                    TestOutcome::Defined { t } => t,
                    _ => panic!("unexpected degeneracy"),
                };
                assert!(at(lower) > 0.0 && at(upper) < 0.0, "seed {seed}");
                assert!(lower <= tau_hat && tau_hat <= upper);
            }
        }
    }

    #[test]
    fn grid_scan_agrees_with_closed_form() {
        let step = 1e-3;
        for seed in 0..10u64 {
            let (trial, design) = simulated_trial(seed, 12, 0.6);
            let set = tau_confidence_set(&trial, &design, 0.05).unwrap();
            let endpoints = set.finite_endpoints();
            let mut tau0 = -3.0;
            while tau0 <= 4.0 {
                let direct = match test_statistic(&trial, &design, tau0).unwrap() {
                    TestOutcome::Defined { t } => t.abs() <= set.critical_z,
                    TestOutcome::ZeroVariance { numerator } => numerator == 0.0,
                };
                let closed = set.contains(tau0);
                if direct != closed {
                    let near_boundary = endpoints.iter().any(|e| (e - tau0).abs() <= step);
                    assert!(
                        near_boundary,
                        "seed {seed}: disagreement at {tau0} far from any endpoint {endpoints:?}"
                    );
                }
                tau0 += step;
            }
        }
    }

    #[test]
    fn alpha_one_degenerates_to_the_ratio_point() {
        let (trial, design) = simulated_trial(2, 12, 0.7);
        let set = tau_confidence_set(&trial, &design, 1.0).unwrap();
        match set.shape {
            TauSetShape::Point { value } => {
                let est = point_estimates(&trial, &design).unwrap();
                // with z = 0 the accepted point is where the numerator
                // vanishes: the ratio of arm-mean differences, which is not
                // in general the weighted point estimate
                let arms = arm_totals(&trial);
                let dy = arms.treated.iter().map(|p| p.0).sum::<f64>() / arms.treated.len() as f64
                    - arms.control.iter().map(|p| p.0).sum::<f64>() / arms.control.len() as f64;
                let dd = arms.treated.iter().map(|p| p.1).sum::<f64>() / arms.treated.len() as f64
                    - arms.control.iter().map(|p| p.1).sum::<f64>() / arms.control.len() as f64;
                assert!((value - dy / dd).abs() < 1e-12);
                let _ = est;
            }
            other => panic!("expected point, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_quadratic_yields_whole_line_with_diagnostic() {
        // identical clusters: all cluster totals equal, so every centered
        // sum and every arm difference is zero
        let trial = trial_from_totals(
            &[true, true, false, false],
            &[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0), (1.0, 1.0)],
        );
        let design = Design::new(4, 2).unwrap();
        let set = tau_confidence_set(&trial, &design, 0.05).unwrap();
        assert_eq!(set.shape, TauSetShape::WholeLine);
        assert!(set.diagnostic.is_some());
    }

    #[test]
    fn quadratic_shapes_cover_ray_and_two_ray_geometry() {
        // a = 0, b > 0: left ray
        let (shape, _) = solve_quadratic_inequality(0.0, 2.0, -4.0);
        assert_eq!(shape, TauSetShape::LeftRay { upper: 2.0 });
        let (shape, _) = solve_quadratic_inequality(0.0, -2.0, 4.0);
        assert_eq!(shape, TauSetShape::RightRay { lower: 2.0 });
        // downward parabola positive between roots 1 and 3
        let (shape, _) = solve_quadratic_inequality(-1.0, 4.0, -3.0);
        match shape {
            TauSetShape::TwoRays {
                left_upper,
                right_lower,
            } => {
                assert!((left_upper - 1.0).abs() < 1e-12);
                assert!((right_lower - 3.0).abs() < 1e-12);
            }
            other => panic!("expected two rays, got {other:?}"),
        }
        // upward parabola never negative
        let (shape, _) = solve_quadratic_inequality(1.0, 0.0, 1.0);
        assert_eq!(shape, TauSetShape::Empty);
        // touching at one point
        let (shape, _) = solve_quadratic_inequality(1.0, -2.0, 1.0);
        assert_eq!(shape, TauSetShape::Point { value: 1.0 });
        // downward, never positive
        let (shape, _) = solve_quadratic_inequality(-1.0, 0.0, -1.0);
        assert_eq!(shape, TauSetShape::WholeLine);
    }

    #[test]
    fn band_extent_geometry() {
        let set = |shape: TauSetShape| TauSet {
            alpha: 0.05,
            critical_z: 1.96,
            shape,
            diagnostic: None,
        };
        // band covering all achievable values: the whole square
        let s = set(TauSetShape::Interval {
            lower: -1.0,
            upper: 3.0,
        });
        let (x, y) = band_extents(&s, 1.0);
        assert_eq!(x, Some((0.0, 1.0)));
        assert_eq!(y, Some((0.0, 1.0)));

        // interior band at slope 1/2
        let s = set(TauSetShape::Interval {
            lower: 0.5,
            upper: 0.8,
        });
        let (x, y) = band_extents(&s, 0.5);
        let (x_lo, x_hi) = x.unwrap();
        let (y_lo, y_hi) = y.unwrap();
        assert_eq!((x_lo, x_hi), (0.0, 1.0));
        assert_eq!(y_lo, 0.0);
        assert!((y_hi - 0.8).abs() < 1e-15);

        // band entirely above achievable values: empty
        let s = set(TauSetShape::Interval {
            lower: 2.5,
            upper: 3.0,
        });
        let (x, y) = band_extents(&s, 1.0);
        assert_eq!((x, y), (None, None));

        // two rays: hull of both slices per axis
        let s = set(TauSetShape::TwoRays {
            left_upper: 0.2,
            right_lower: 1.4,
        });
        let (x, y) = band_extents(&s, 1.0);
        assert_eq!(x, Some((0.0, 1.0)));
        assert_eq!(y, Some((0.0, 1.0)));

        // left ray only reaches small values
        let s = set(TauSetShape::LeftRay { upper: 0.3 });
        let (x, y) = band_extents(&s, 0.5);
        assert_eq!(x, Some((0.0, 0.6)));
        assert_eq!(y, Some((0.0, 0.3)));
    }

    #[test]
    fn region_duality_on_grid() {
        for seed in [1u64, 4, 9] {
            let (trial, design) = simulated_trial(seed, 14, 0.7);
            let region = match simultaneous_region(&trial, &design, 0.05) {
                Ok(r) => r,
                // boundary compliance estimates are legitimately refused
                Err(_) => continue,
            };
            let raster = region.raster(41).unwrap();
            for iy in 0..41 {
                for ix in 0..41 {
                    let x0 = raster.coord(ix);
                    let y0 = raster.coord(iy);
                    let direct = match test_statistic(
                        &trial,
                        &design,
                        y0 + region.r_hat * x0,
                    )
                    .unwrap()
                    {
                        TestOutcome::Defined { t } => t.abs() <= region.tau_set.critical_z,
                        TestOutcome::ZeroVariance { numerator } => numerator == 0.0,
                    };
                    let member = raster.at(ix, iy);
                    if direct != member {
                        // tolerate only exact-boundary float discrepancies
                        let tau0 = y0 + region.r_hat * x0;
                        let near = region
                            .tau_set
                            .finite_endpoints()
                            .iter()
                            .any(|e| (e - tau0).abs() < 1e-9);
                        assert!(near, "seed {seed}: duality broken at ({x0},{y0})");
                    }
                }
            }
        }
    }

    #[test]
    fn region_requires_binary_one_sided_interior_compliance() {
        let design = Design::new(4, 2).unwrap();
        // non-binary outcome
        let trial = trial_from_totals(
            &[true, false, true, false],
            &[(0.5, 1.0), (0.0, 0.0), (1.0, 1.0), (0.0, 0.0)],
        );
        assert!(simultaneous_region(&trial, &design, 0.05).is_err());
        // two-sided receipt
        let trial = trial_from_totals(
            &[true, false, true, false],
            &[(1.0, 1.0), (0.0, 1.0), (1.0, 1.0), (0.0, 0.0)],
        );
        assert!(simultaneous_region(&trial, &design, 0.05).is_err());
        // full compliance: p_co_hat = 1
        let trial = trial_from_totals(
            &[true, false, true, false],
            &[(1.0, 1.0), (0.0, 0.0), (1.0, 1.0), (0.0, 0.0)],
        );
        assert!(simultaneous_region(&trial, &design, 0.05).is_err());
    }

    #[test]
    fn pivotality_report_small_j_still_produced() {
        let params = PopulationParams::one_sided_binary(6, 3, 5, 0.7);
        let pop = random_population(&params, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let e = pop.true_estimands().unwrap();
        let design = Design::new(6, 3).unwrap();
        let report = pivotality_check(
            &pop,
            &design,
            e.pe_nt_avg.unwrap_or(0.0),
            e.te_co_avg.unwrap(),
            0.05,
            200,
            13,
        )
        .unwrap();
        assert_eq!(report.defined + report.undefined, 200);
        assert!(report.ks_distance > 0.0);
    }
}
