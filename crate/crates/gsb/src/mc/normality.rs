//! Composite normality tests used on the Monte Carlo estimate samples:
//! Anderson-Darling and Cramer-von Mises for the estimated-parameter
//! case, and Jarque-Bera with a Monte Carlo p-value.
//!
//! Both EDF statistics are reported unmodified while their p-values use
//! the small-sample corrected statistics, mirroring common statistical
//! software so published tables stay comparable. The exact constants:
//!
//! * AD: `A*^2 = A^2 (1 + 0.75/n + 2.25/n^2)` with the piecewise
//!   exponential p-value fit (breakpoints 0.2, 0.34, 0.6, 10).
//! * CvM: `W* = W (1 + 0.5/n)` with the piecewise fit (breakpoints
//!   0.0275, 0.051, 0.092, 1.1).
//! * JB: `n (skew^2 / 6 + (kurt - 3)^2 / 24)`, p-value as the exceedance
//!   frequency over simulated Gaussian samples of the same length.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::statfun::std_normal_cdf;

/// Minimum sample size accepted by the tests.
pub const MIN_TEST_LEN: usize = 8;

fn mean_and_sd(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let ss: f64 = sample.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, libm::sqrt(ss / (n - 1.0)))
}

fn standardised_sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.len() < MIN_TEST_LEN {
        return Err(Error::TooShort { needed: MIN_TEST_LEN, got: sample.len() });
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("normality tests require finite samples"));
    }
    let (mean, sd) = mean_and_sd(sample);
    if sd.is_nan() || sd <= 0.0 {
        return Err(Error::Domain("normality tests require positive sample variance"));
    }
    let mut z: Vec<f64> = sample
        .iter()
        .map(|v| std_normal_cdf((v - mean) / sd).value().clamp(1e-300, 1.0 - 1e-16))
        .collect();
    z.sort_unstable_by(f64::total_cmp);
    Ok(z)
}

/// Anderson-Darling composite normality test; returns `(A^2, p)`.
pub fn ad_test(sample: &[f64]) -> Result<(f64, f64)> {
    let z = standardised_sorted(sample)?;
    let n = z.len();
    let nf = n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let coeff = (2 * (i + 1) - 1) as f64;
        acc += coeff * (libm::log(z[i]) + libm::log(1.0 - z[n - 1 - i]));
    }
    let a2 = -nf - acc / nf;
    let modified = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let p = if modified < 0.2 {
        1.0 - libm::exp(-13.436 + 101.14 * modified - 223.73 * modified * modified)
    } else if modified < 0.34 {
        1.0 - libm::exp(-8.318 + 42.796 * modified - 59.938 * modified * modified)
    } else if modified < 0.6 {
        libm::exp(0.9177 - 4.279 * modified - 1.38 * modified * modified)
    } else if modified < 10.0 {
        libm::exp(1.2937 - 5.709 * modified + 0.0186 * modified * modified)
    } else {
        3.7e-24
    };
    Ok((a2, p.clamp(0.0, 1.0)))
}

/// Cramer-von Mises composite normality test; returns `(W, p)`.
pub fn cvm_test(sample: &[f64]) -> Result<(f64, f64)> {
    let z = standardised_sorted(sample)?;
    let n = z.len();
    let nf = n as f64;
    let mut w = 1.0 / (12.0 * nf);
    for (i, &zi) in z.iter().enumerate() {
        let target = (2.0 * (i + 1) as f64 - 1.0) / (2.0 * nf);
        w += (zi - target) * (zi - target);
    }
    let modified = w * (1.0 + 0.5 / nf);
    let p = if modified < 0.0275 {
        1.0 - libm::exp(-13.953 + 775.5 * modified - 12542.61 * modified * modified)
    } else if modified < 0.051 {
        1.0 - libm::exp(-5.903 + 179.546 * modified - 1515.29 * modified * modified)
    } else if modified < 0.092 {
        libm::exp(0.886 - 31.62 * modified + 10.897 * modified * modified)
    } else if modified < 1.1 {
        libm::exp(1.111 - 34.242 * modified + 12.832 * modified * modified)
    } else {
        7.37e-10
    };
    Ok((w, p.clamp(0.0, 1.0)))
}

/// Jarque-Bera statistic `n (skew^2 / 6 + (kurt - 3)^2 / 24)` with
/// biased (divisor n) sample moments.
pub fn jb_statistic(sample: &[f64]) -> Result<f64> {
    if sample.len() < MIN_TEST_LEN {
        return Err(Error::TooShort { needed: MIN_TEST_LEN, got: sample.len() });
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in sample {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2.is_nan() || m2 <= 0.0 {
        return Err(Error::Domain("normality tests require positive sample variance"));
    }
    let skew = m3 / libm::pow(m2, 1.5);
    let kurt = m4 / (m2 * m2);
    Ok(n * (skew * skew / 6.0 + (kurt - 3.0) * (kurt - 3.0) / 24.0))
}

/// Composite Jarque-Bera test; the p-value is the exceedance frequency
/// of the statistic over `mc_reps` simulated standard-normal samples of
/// the same length, deterministic in `seed`. Returns `(JB, p)`.
pub fn jb_test(sample: &[f64], mc_reps: usize, seed: u64) -> Result<(f64, f64)> {
    if mc_reps == 0 {
        return Err(Error::Domain("jb_test needs at least one Monte Carlo replication"));
    }
    let observed = jb_statistic(sample)?;
    let n = sample.len();
    let mut exceed = 0usize;
    let mut draw = Vec::with_capacity(n);
    for rep in 0..mc_reps {
        let mut rng = StreamRng::new(seed, rep as u64);
        draw.clear();
        draw.extend((0..n).map(|_| rng.standard_normal()));
        if jb_statistic(&draw)? >= observed {
            exceed += 1;
        }
    }
    let p = (exceed + 1) as f64 / (mc_reps + 1) as f64;
    Ok((observed, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn normal_sample(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = StreamRng::new(seed, 0);
        (0..n).map(|_| rng.standard_normal()).collect()
    }

    fn exponential_sample(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = StreamRng::new(seed, 0);
        (0..n).map(|_| -libm::log(rng.uniform_open())).collect()
    }

    #[test]
    fn gaussian_samples_are_not_rejected() {
        let x = normal_sample(1000, 2718);
        let (_, ad_p) = ad_test(&x).unwrap();
        let (_, cvm_p) = cvm_test(&x).unwrap();
        let (_, jb_p) = jb_test(&x, 500, 11).unwrap();
        assert!(ad_p > 0.01, "AD p {ad_p}");
        assert!(cvm_p > 0.01, "CvM p {cvm_p}");
        assert!(jb_p > 0.01, "JB p {jb_p}");
    }

    #[test]
    fn exponential_samples_are_rejected() {
        let x = exponential_sample(1000, 31415);
        let (ad, ad_p) = ad_test(&x).unwrap();
        let (w, cvm_p) = cvm_test(&x).unwrap();
        let (jb, jb_p) = jb_test(&x, 500, 12).unwrap();
        assert!(ad > 1.0 && ad_p < 0.01, "AD {ad} p {ad_p}");
        assert!(w > 0.2 && cvm_p < 0.01, "W {w} p {cvm_p}");
        assert!(jb > 20.0 && jb_p < 0.01, "JB {jb} p {jb_p}");
    }

    #[test]
    fn jb_two_point_sample_closed_form() {
        // half -1, half +1: zero skewness, kurtosis 1, statistic n/6
        let n = 64;
        let mut x = Vec::with_capacity(n);
        x.extend(core::iter::repeat_n(-1.0, n / 2));
        x.extend(core::iter::repeat_n(1.0, n / 2));
        let jb = jb_statistic(&x).unwrap();
        assert!((jb - n as f64 / 6.0).abs() < 1e-12, "JB {jb}");
    }

    #[test]
    fn tests_reject_degenerate_input() {
        let tiny = [0.1, 0.2, 0.3];
        assert!(ad_test(&tiny).is_err());
        assert!(cvm_test(&tiny).is_err());
        assert!(jb_test(&tiny, 100, 0).is_err());
        let constant = [1.0; 50];
        assert!(ad_test(&constant).is_err());
        assert!(jb_statistic(&constant).is_err());
    }

    #[test]
    fn jb_p_value_is_deterministic_in_seed() {
        let x = normal_sample(200, 5);
        let a = jb_test(&x, 300, 9).unwrap();
        let b = jb_test(&x, 300, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ad_statistic_scale_invariance() {
        let x = normal_sample(500, 88);
        let scaled: Vec<f64> = x.iter().map(|v| 3.0 * v + 10.0).collect();
        let (a, _) = ad_test(&x).unwrap();
        let (b, _) = ad_test(&scaled).unwrap();
        assert!((a - b).abs() < 1e-10, "composite test must be location-scale free");
    }
}
