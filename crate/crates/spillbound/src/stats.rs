//! Small numeric helpers: compensated summation, medians, and the
//! Kolmogorov-Smirnov distance against a reference CDF.

/// Neumaier-compensated accumulator. Finite-population identities in this
/// crate are asserted to 1e-12, which plain left-to-right summation does not
/// guarantee once populations get large; the compensation term keeps the
/// accumulated error near one ulp of the total.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator of f64.
pub fn csum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Median of a slice. Averages the two middle order statistics for even
/// lengths. Panics on empty input.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("median: non-finite value"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Mean with compensated summation. Panics on empty input.
pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "mean of empty slice");
    csum(values.iter().copied()) / values.len() as f64
}

/// Sample standard deviation (n-1 denominator). Panics when fewer than two values.
pub fn sample_sd(values: &[f64]) -> f64 {
    assert!(values.len() >= 2, "sd needs at least two values");
    let m = mean(values);
    let ss = csum(values.iter().map(|v| (v - m) * (v - m)));
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical distribution
/// of `sample` and a reference CDF: sup_x |F_n(x) - F(x)| evaluated at the
/// sample points from both sides.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!sample.is_empty(), "ks distance of empty sample");
    let mut v = sample.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("ks: non-finite value"));
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}
