//! Parameter estimation for the integrated Split-MA(1) model: the
//! method-of-moments initial estimator, the squared CF-distance
//! objective over a cubature rule, a Nelder-Mead minimiser, and the
//! combined ECF estimator.
//!
//! The moment estimator inverts `rho(1) = -b_c / (1 + b_c)`, which is
//! only possible when the sample lag-1 autocorrelation falls inside
//! `(-1/2, 0)`; outside that region [`estimate_mom`] reports
//! [`Error::Infeasible`] with the offending value. The ECF estimator
//! then minimises the cubature approximation of
//!
//! ```text
//! S_T(theta) = Int g(u) (cf2(u; theta) - ecf(u))^2 du
//! ```
//!
//! starting from the moment estimate. The search runs in
//! `(logit(b_c), log(sigma2))` coordinates so the open parameter box is
//! enforced by construction.
//!
//! Only the integrated order-1 model is packaged end to end.
//! Higher-order objectives can be assembled from the public pieces
//! ([`ecf_at_nodes`], [`crate::charfn::cf2`] at any order,
//! [`nelder_mead`]), but identification at order p needs blocks longer
//! than the pairs used here, so no ready-made estimator is offered.

use alloc::vec::Vec;

use crate::charfn::Cf2Kernel;
use crate::error::{Error, Result};
use crate::quad::{gamma_for_weight, CubatureRule};
use crate::statfun::{chi2_1_quantile, Probability};

/// Minimum sample length accepted by [`estimate_mom`]; below this the
/// lag-1 autocorrelation is too noisy to respect the feasibility
/// interval with useful probability.
pub const MIN_SAMPLE_LEN: usize = 30;

/// Empirical autocovariance with divisor `T`:
/// `(1/T) sum_{t=1}^{T-h} (x_t - xbar)(x_{t+h} - xbar)`.
pub fn empirical_acov(x: &[f64], h: usize) -> Result<f64> {
    if x.len() <= h {
        return Err(Error::TooShort { needed: h + 1, got: x.len() });
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let acc: f64 = (0..x.len() - h).map(|t| (x[t] - mean) * (x[t + h] - mean)).sum();
    Ok(acc / n)
}

/// Method-of-moments estimate of `(b_c, sigma2, c)` from the lag-1
/// autocorrelation and the variance of the increments.
#[derive(Debug, Clone)]
pub struct MomEstimate {
    pub b_c_hat: Probability,
    pub sigma2_hat: f64,
    pub c_hat: f64,
    /// Lag-1 sample autocorrelation the estimate was inverted from.
    pub rho1_hat: f64,
    /// Sample variance of the increments.
    pub gamma0_hat: f64,
}

/// Moment estimator on an increment series. Needs at least
/// [`MIN_SAMPLE_LEN`] observations; fails with [`Error::Infeasible`]
/// when the lag-1 autocorrelation leaves `(-1/2, 0)` (this includes
/// degenerate zero-variance input).
pub fn estimate_mom(x: &[f64]) -> Result<MomEstimate> {
    if x.len() < MIN_SAMPLE_LEN {
        return Err(Error::TooShort { needed: MIN_SAMPLE_LEN, got: x.len() });
    }
    let gamma0 = empirical_acov(x, 0)?;
    let gamma1 = empirical_acov(x, 1)?;
    if gamma0.is_nan() || gamma0 <= 0.0 {
        return Err(Error::Infeasible { rho1: f64::NAN });
    }
    estimate_mom_from_stats(gamma1 / gamma0, gamma0)
}

/// Moment estimator from pre-computed statistics: `b_c = -rho / (1 + rho)`,
/// `sigma2 = gamma0 / (1 + b_c)`, `c = sigma2 * F^{-1}(b_c)`.
pub fn estimate_mom_from_stats(rho1: f64, gamma0: f64) -> Result<MomEstimate> {
    if !(rho1 > -0.5 && rho1 < 0.0) {
        return Err(Error::Infeasible { rho1 });
    }
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(Error::Infeasible { rho1: f64::NAN });
    }
    let b = -rho1 / (1.0 + rho1);
    let b_c_hat = Probability::new(b)?;
    let sigma2_hat = gamma0 / (1.0 + b);
    let c_hat = sigma2_hat * chi2_1_quantile(b_c_hat)?;
    Ok(MomEstimate { b_c_hat, sigma2_hat, c_hat, rho1_hat: rho1, gamma0_hat: gamma0 })
}

/// Evaluates the real empirical characteristic function of the pairs
/// `(x_t, x_{t+1})` at every cubature node, in node order.
///
/// The estimators work from this vector alone, so the data series is
/// touched exactly once per rule.
pub fn ecf_at_nodes(data: &[f64], rule: &CubatureRule) -> Result<Vec<f64>> {
    if data.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: data.len() });
    }
    let blocks = (data.len() - 1) as f64;
    Ok(rule
        .points()
        .iter()
        .map(|&(u1, u2)| {
            let mut acc = 0.0;
            for t in 0..data.len() - 1 {
                acc += libm::cos(u1 * data[t] + u2 * data[t + 1]);
            }
            acc / blocks
        })
        .collect())
}

/// Cubature approximation of the squared CF distance for the integrated
/// order-1 model at `(b_c, sigma2)`:
/// `sum_j w_j (cf2(u_j; b_c, sigma2) - ecf_j)^2`.
///
/// Points outside the open parameter box evaluate to infinity, which the
/// simplex search treats as any other bad value.
pub fn objective_s2(b_c: f64, sigma2: f64, ecf_nodes: &[f64], rule: &CubatureRule) -> f64 {
    debug_assert_eq!(ecf_nodes.len(), rule.len());
    let Ok(kernel) = Cf2Kernel::new(b_c, sigma2) else {
        return f64::INFINITY;
    };
    rule.points()
        .iter()
        .zip(rule.weights())
        .zip(ecf_nodes)
        .map(|((&(u1, u2), &w), &e)| {
            let d = kernel.eval(u1, u2) - e;
            w * d * d
        })
        .sum()
}

/// Options for [`nelder_mead`].
#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Simplex diameter below which the search stops.
    pub x_tol: f64,
    /// Function-value spread below which the search stops.
    pub f_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_iter: 2000, x_tol: 1e-8, f_tol: 1e-12 }
    }
}

/// Outcome of a simplex search.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x_min: Vec<f64>,
    pub f_min: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Derivative-free simplex minimisation with the standard moves
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
///
/// The initial simplex perturbs each coordinate of `x0` by 5% (or a
/// small absolute step at zero). The best vertex never worsens, so
/// `f(x_min) <= f(x0)` always holds; non-convergence within
/// `max_iter` is reported through the flag, not an error.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let dim = x0.len();
    assert!(dim >= 1, "nelder_mead needs at least one coordinate");

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += if v[i] != 0.0 { 0.05 * v[i].abs() } else { 2.5e-4 };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let diameter = simplex
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        let spread = values[worst] - values[best];
        if diameter < opts.x_tol || spread.abs() < opts.f_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = alloc::vec![0.0; dim];
        for (idx, v) in simplex.iter().enumerate() {
            if idx == worst {
                continue;
            }
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let blend = |from: &[f64], coeff: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, x)| c + coeff * (c - x))
                .collect()
        };

        let reflected = blend(&simplex[worst], REFLECT);
        let f_reflected = f(&reflected);

        if f_reflected < values[best] {
            let expanded = blend(&simplex[worst], EXPAND);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }

        // contract towards the better of worst/reflected
        let contracted = if f_reflected < values[worst] {
            blend(&simplex[worst], REFLECT * CONTRACT)
        } else {
            blend(&simplex[worst], -CONTRACT)
        };
        let f_contracted = f(&contracted);
        if f_contracted < values[worst].min(f_reflected) {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }

        for idx in 0..=dim {
            if idx == best {
                continue;
            }
            let shrunk: Vec<f64> = simplex[best]
                .iter()
                .zip(&simplex[idx])
                .map(|(b, x)| b + SHRINK * (x - b))
                .collect();
            values[idx] = f(&shrunk);
            simplex[idx] = shrunk;
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if values[i] < values[best] {
            best = i;
        }
    }
    NelderMeadResult {
        x_min: simplex.swap_remove(best),
        f_min: values[best],
        iterations,
        converged,
    }
}

/// Options for [`estimate_ecf`].
#[derive(Debug, Clone)]
pub struct EcfOptions {
    pub nelder_mead: NelderMeadOptions,
    /// Hard cap on `sigma2` during the search; the open box only needs
    /// some finite bound.
    pub sigma2_cap: f64,
}

impl Default for EcfOptions {
    fn default() -> Self {
        Self { nelder_mead: NelderMeadOptions::default(), sigma2_cap: 1e6 }
    }
}

/// ECF estimate of `(b_c, sigma2, c)` for the integrated order-1 model
/// under one weight.
#[derive(Debug, Clone)]
pub struct EcfEstimate {
    pub b_c_hat: Probability,
    pub sigma2_hat: f64,
    pub c_hat: f64,
    /// Objective value at the optimum; never exceeds the value at the
    /// starting point.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub weight_k: u8,
}

fn logit(p: f64) -> f64 {
    libm::log(p / (1.0 - p))
}

fn from_logit(x: f64) -> f64 {
    (1.0 / (1.0 + libm::exp(-x))).clamp(1e-12, 1.0 - 1e-12)
}

/// Minimises the cubature ECF objective from the moment estimate.
///
/// `rule` must be built with `gamma = weight_k / 2`. The data series is
/// summarised once into its ECF values at the nodes; non-convergence of
/// the simplex search sets the flag and returns the best point found.
pub fn estimate_ecf(
    x: &[f64],
    weight_k: u8,
    init: &MomEstimate,
    rule: &CubatureRule,
    opts: &EcfOptions,
) -> Result<EcfEstimate> {
    let ecf_nodes = ecf_at_nodes(x, rule)?;
    estimate_ecf_precomputed(&ecf_nodes, weight_k, init, rule, opts)
}

/// [`estimate_ecf`] on a pre-computed ECF-at-nodes vector.
pub fn estimate_ecf_precomputed(
    ecf_nodes: &[f64],
    weight_k: u8,
    init: &MomEstimate,
    rule: &CubatureRule,
    opts: &EcfOptions,
) -> Result<EcfEstimate> {
    let gamma = gamma_for_weight(weight_k)?;
    if (rule.gamma() - gamma).abs() > 1e-12 {
        return Err(Error::Precondition("cubature rule was built for a different weight"));
    }
    if ecf_nodes.len() != rule.len() {
        return Err(Error::Precondition("ecf vector does not match the cubature nodes"));
    }

    let cap = opts.sigma2_cap;
    let objective = |v: &[f64]| -> f64 {
        let b = from_logit(v[0]);
        let s2 = libm::exp(v[1]).clamp(1e-100, cap);
        objective_s2(b, s2, ecf_nodes, rule)
    };

    let x0 = [logit(init.b_c_hat.value()), libm::log(init.sigma2_hat.min(cap))];
    let result = nelder_mead(objective, &x0, &opts.nelder_mead);

    let b_c = from_logit(result.x_min[0]);
    let sigma2 = libm::exp(result.x_min[1]).clamp(1e-100, cap);
    let b_c_hat = Probability::new(b_c)?;
    let c_hat = sigma2 * chi2_1_quantile(b_c_hat)?;
    Ok(EcfEstimate {
        b_c_hat,
        sigma2_hat: sigma2,
        c_hat,
        objective: result.f_min,
        iterations: result.iterations,
        converged: result.converged,
        weight_k,
    })
}
