//! Scalar special functions shared by the model and estimation layers:
//! the standard normal CDF/density and the chi-squared(1) CDF and
//! quantile.
//!
//! The chi-squared(1) pair ties the indicator probability `b_c` to the
//! critical value through `c = sigma2 * chi2_1_quantile(b_c)`, so its
//! accuracy carries straight into the estimators.

use core::f64::consts::{FRAC_1_SQRT_2, FRAC_2_SQRT_PI};
use core::fmt;

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A probability, guaranteed to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Domain("probability must lie in [0, 1]"))
        }
    }

    /// Clamps into `[0, 1]`; for functions whose contract is to saturate.
    fn saturating(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * x * x)
}

/// Centred normal density with variance `var`.
#[inline]
pub fn normal_pdf(x: f64, var: f64) -> f64 {
    FRAC_1_SQRT_2PI / libm::sqrt(var) * libm::exp(-0.5 * x * x / var)
}

/// Standard normal CDF, `Phi(x) = erfc(-x / sqrt(2)) / 2`.
///
/// Saturates to 0 and 1 in the extreme tails.
pub fn std_normal_cdf(x: f64) -> Probability {
    Probability::saturating(0.5 * libm::erfc(-x * FRAC_1_SQRT_2))
}

/// Chi-squared(1) CDF, `F(x) = P(Z^2 <= x) = erf(sqrt(x / 2))`.
///
/// Fails for `x < 0`.
pub fn chi2_1_cdf(x: f64) -> Result<Probability> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain("chi2_1_cdf requires x >= 0"));
    }
    Ok(Probability::saturating(libm::erf(libm::sqrt(0.5 * x))))
}

/// Chi-squared(1) quantile, the inverse of [`chi2_1_cdf`] on `(0, 1)`.
///
/// Solves `erf(t) = p` by a bracketed Newton iteration (bisection
/// fallback keeps every step inside the bracket) and returns `x = 2 t^2`.
/// The bracket starts at `[0, 1]` and doubles until it contains the
/// root, which makes the routine robust for `p` near 1.
pub fn chi2_1_quantile(p: Probability) -> Result<f64> {
    let p = p.value();
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain("chi2_1_quantile requires 0 < p < 1"));
    }

    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    while libm::erf(hi) < p {
        lo = hi;
        hi *= 2.0;
    }

    let mut t = 0.5 * (lo + hi);
    for _ in 0..100 {
        let f = libm::erf(t) - p;
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        if f.abs() <= 1e-15 || (hi - lo) <= f64::EPSILON * t {
            break;
        }
        let deriv = FRAC_2_SQRT_PI * libm::exp(-t * t);
        let next = t - f / deriv;
        t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }

    Ok(2.0 * t * t)
}
