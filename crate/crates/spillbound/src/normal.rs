//! Standard normal quantile and CDF as self-contained rational
//! approximations, so confidence endpoints are bit-stable across platforms
//! and library versions.
//!
//! Quantile: Wichura's algorithm AS 241 (PPND16), three rational pieces,
//! absolute error below 1e-15 over (0,1). CDF: Cody's rational erf/erfc
//! (the SPECFUN kernels), relative error near machine epsilon.

/// Polynomial evaluation, coefficients ordered highest degree first.
fn horner(x: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// Inverse standard normal CDF (AS 241, PPND16 variant).
///
/// Accepts p in the open interval (0,1). Panics outside [0,1]; returns
/// +-infinity at the endpoints.
pub fn normal_quantile(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "normal_quantile: p={p} outside [0,1]");
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }

    const CENTRAL_NUM: [f64; 8] = [
        2.5090809287301226727e3,
        3.3430575583588128105e4,
        6.7265770927008700853e4,
        4.5921953931549871457e4,
        1.3731693765509461125e4,
        1.9715909503065514427e3,
        1.3314166789178437745e2,
        3.3871328727963666080,
    ];
    const CENTRAL_DEN: [f64; 8] = [
        5.2264952788528545610e3,
        2.8729085735721942674e4,
        3.9307895800092710610e4,
        2.1213794301586595867e4,
        5.3941960214247511077e3,
        6.8718700749205790830e2,
        4.2313330701600911252e1,
        1.0,
    ];
    const TAIL_NUM: [f64; 8] = [
        7.74545014278341407640e-4,
        2.27238449892691845833e-2,
        2.41780725177450611770e-1,
        1.27045825245236838258,
        3.64784832476320460504,
        5.76949722146069140550,
        4.63033784615654529590,
        1.42343711074968357734,
    ];
    const TAIL_DEN: [f64; 8] = [
        1.05075007164441684324e-9,
        5.47593808499534494600e-4,
        1.51986665636164571966e-2,
        1.48103976427480074590e-1,
        6.89767334985100004550e-1,
        1.67638483018380384940,
        2.05319162663775882187,
        1.0,
    ];
    const FAR_NUM: [f64; 8] = [
        2.01033439929228813265e-7,
        2.71155556874348757815e-5,
        1.24266094738807843860e-3,
        2.65321895265761230930e-2,
        2.96560571828504891230e-1,
        1.78482653991729133580,
        5.46378491116411436990,
        6.65790464350110377720,
    ];
    const FAR_DEN: [f64; 8] = [
        2.04426310338993978564e-15,
        1.42151175831644588870e-7,
        1.84631831751005468180e-5,
        7.86869131145613259100e-4,
        1.48753612908506148525e-2,
        1.36929880922735805310e-1,
        5.99832206555887937690e-1,
        1.0,
    ];

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        // central region: rational in r = 0.180625 - q^2
        let r = 0.180625 - q * q;
        return q * horner(r, &CENTRAL_NUM) / horner(r, &CENTRAL_DEN);
    }

    let smaller = if q < 0.0 { p } else { 1.0 - p };
    let r = (-smaller.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        horner(r, &TAIL_NUM) / horner(r, &TAIL_DEN)
    } else {
        let r = r - 5.0;
        horner(r, &FAR_NUM) / horner(r, &FAR_DEN)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Standard normal CDF via Cody's erf/erfc rational approximations.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

const ERF_SMALL_NUM: [f64; 5] = [
    1.85777706184603153e-1,
    3.16112374387056560,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
];
const ERF_SMALL_DEN: [f64; 5] = [
    1.0,
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const ERFC_MID_NUM: [f64; 9] = [
    2.15311535474403846e-8,
    5.64188496988670089e-1,
    8.88314979438837594,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
];
const ERFC_MID_DEN: [f64; 9] = [
    1.0,
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const ERFC_FAR_NUM: [f64; 6] = [
    1.63153871373020978e-2,
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
];
const ERFC_FAR_DEN: [f64; 6] = [
    1.0,
    2.56852019228982242,
    1.87295284992346047,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

/// Error function, |relative error| < 1e-15 (Cody regions).
pub fn erf(x: f64) -> f64 {
    if x.abs() <= 0.46875 {
        let z = x * x;
        x * horner(z, &ERF_SMALL_NUM) / horner(z, &ERF_SMALL_DEN)
    } else if x > 0.0 {
        1.0 - erfc_positive(x)
    } else {
        erfc_positive(-x) - 1.0
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.abs() <= 0.46875 {
        1.0 - erf(x)
    } else if x > 0.0 {
        erfc_positive(x)
    } else {
        2.0 - erfc_positive(-x)
    }
}

/// erfc for x >= 0.46875 (Cody regions 2 and 3).
fn erfc_positive(x: f64) -> f64 {
    debug_assert!(x >= 0.46875);
    if x <= 4.0 {
        exp_mx2(x) * horner(x, &ERFC_MID_NUM) / horner(x, &ERFC_MID_DEN)
    } else if x > 26.6 {
        // underflows double precision
        0.0
    } else {
        // asymptotic region: erfc = exp(-x^2)/x * (1/sqrt(pi) - z*P(z)/Q(z))
        let z = 1.0 / (x * x);
        let r = z * horner(z, &ERFC_FAR_NUM) / horner(z, &ERFC_FAR_DEN);
        let sqrpi = 5.6418958354775628695e-1;
        exp_mx2(x) * (sqrpi - r) / x
    }
}

/// exp(-x^2) with the argument split to reduce rounding in the exponent,
/// as in the SPECFUN kernels.
fn exp_mx2(x: f64) -> f64 {
    let xsq = (x * 16.0).trunc() / 16.0;
    let del = (x - xsq) * (x + xsq);
    (-xsq * xsq).exp() * (-del).exp()
}
