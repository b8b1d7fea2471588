//! The Gaussian Split-BREAK process and its Split-MA increments:
//! definition, simulation, second-order structure, inversion and
//! martingale-mean reconstruction.
//!
//! A GSB(p) level series decomposes as `y_t = m_t + eps_t`, where
//! `(eps_t)` are i.i.d. centred Gaussian innovations and the martingale
//! means follow
//!
//! ```text
//! m_t = sum_j alpha_j * (m_{t-j} + q_{t-j} * eps_{t-j}),
//! ```
//!
//! with the noise indicator `q_t = 1 - theta_t` and
//! `theta_t = I(eps_{t-1}^2 <= c)`. Only "large" shocks (squares above
//! the critical value `c`) enter the level permanently. The increments
//!
//! ```text
//! x_t = eps_t - sum_j alpha_j * theta_{t-j} * eps_{t-j}
//! ```
//!
//! form the Split-MA(p) process, an MA(p) whose lagged terms are
//! randomly switched off. `(x_t)` is always stationary; the level is
//! stationary iff `sum(alpha) < 1` and the increments are invertible iff
//! `b_c * sum(alpha) < 1`, where `b_c = P(eps^2 <= c)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::rng::StreamRng;
use crate::statfun::{chi2_1_quantile, Probability};

/// Tolerance used to recognise the integrated case `sum(alpha) = 1`.
pub const INTEGRATED_TOL: f64 = 1e-12;

/// Parameter vector of a Split-MA(p) / GSB(p) process:
/// `(alpha_1, ..., alpha_p, b_c, sigma2)` with the critical value
/// `c = sigma2 * F^{-1}(b_c)` derived from the chi-squared(1) quantile.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitMaParams {
    alphas: Vec<f64>,
    b_c: Probability,
    sigma2: f64,
    c: f64,
}

impl SplitMaParams {
    /// Validates and builds a parameter vector.
    ///
    /// Requires a non-empty coefficient vector with `alpha_j >= 0`,
    /// `0 < b_c < 1` (non-triviality) and `sigma2 > 0`.
    pub fn new(alphas: Vec<f64>, b_c: f64, sigma2: f64) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Precondition("model order p must be at least 1"));
        }
        if alphas.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::Precondition("coefficients alpha_j must be finite and >= 0"));
        }
        if !(b_c > 0.0 && b_c < 1.0) {
            return Err(Error::Precondition("b_c must lie strictly inside (0, 1)"));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::Precondition("sigma2 must be finite and positive"));
        }
        let b_c = Probability::new(b_c)?;
        let c = sigma2 * chi2_1_quantile(b_c)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Precondition("derived critical value is not finite"));
        }
        Ok(Self { alphas, b_c, sigma2, c })
    }

    /// The integrated order-1 model (`p = 1`, `alpha_1 = 1`) used by the
    /// estimation pipeline.
    pub fn integrated_ma1(b_c: f64, sigma2: f64) -> Result<Self> {
        Self::new(vec![1.0], b_c, sigma2)
    }

    /// Model order `p`.
    pub fn order(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Indicator probability `b_c = P(eps^2 <= c)`.
    pub fn b_c(&self) -> Probability {
        self.b_c
    }

    /// Innovation variance.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Critical value `c = sigma2 * F^{-1}(b_c)`.
    pub fn critical_value(&self) -> f64 {
        self.c
    }

    pub fn alpha_sum(&self) -> f64 {
        self.alphas.iter().sum()
    }

    /// `sum(alpha) = 1` within [`INTEGRATED_TOL`]: levels are
    /// non-stationary while the increments stay stationary and
    /// invertible for non-trivial `b_c`.
    pub fn is_integrated(&self) -> bool {
        (self.alpha_sum() - 1.0).abs() <= INTEGRATED_TOL
    }

    /// Stationarity of the level series: `sum(alpha) < 1`.
    pub fn is_stationary(&self) -> bool {
        self.alpha_sum() < 1.0
    }

    /// Invertibility of the increments: `b_c * sum(alpha) < 1`.
    pub fn is_invertible(&self) -> bool {
        self.b_c.value() * self.alpha_sum() < 1.0
    }
}

/// Aligned realisations of one simulated path.
///
/// For every `t`: `y[t] = m[t] + eps[t]`, `theta[t]` is the indicator
/// `I(eps_{t-1}^2 <= c)`, and `x[t]` is the Split-MA increment.
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub eps: Vec<f64>,
    pub theta: Vec<bool>,
    pub x: Vec<f64>,
    pub m: Vec<f64>,
    pub y: Vec<f64>,
    pub seed: u64,
}

/// Simulates a GSB(p) path of length `t_len`, deterministic in
/// `(params, t_len, seed)`.
///
/// Pre-sample convention: `eps_t = 0`, `m_t = 0` and `theta_t = 1` for
/// `t <= 0` (a zero innovation always lies below the critical value),
/// so [`invert`] with zero initial values recovers the innovations
/// exactly.
pub fn simulate(params: &SplitMaParams, t_len: usize, seed: u64) -> SimulationOutput {
    let p = params.order();
    let alphas = params.alphas();
    let c = params.critical_value();
    let sd = libm::sqrt(params.sigma2());
    let mut rng = StreamRng::new(seed, 0);

    let mut eps = Vec::with_capacity(t_len);
    let mut theta = Vec::with_capacity(t_len);
    let mut x = Vec::with_capacity(t_len);
    let mut m = Vec::with_capacity(t_len);
    let mut y = Vec::with_capacity(t_len);

    for i in 0..t_len {
        let theta_i = if i == 0 {
            true
        } else {
            eps[i - 1] * eps[i - 1] <= c
        };
        theta.push(theta_i);

        let mut m_i = 0.0;
        for j in 1..=p.min(i) {
            let prev = i - j;
            let permanent = if theta[prev] { 0.0 } else { eps[prev] };
            m_i += alphas[j - 1] * (m[prev] + permanent);
        }
        m.push(m_i);

        let e = rng.normal(sd);
        let mut x_i = e;
        for j in 1..=p.min(i) {
            let prev = i - j;
            if theta[prev] {
                x_i -= alphas[j - 1] * eps[prev];
            }
        }
        eps.push(e);
        x.push(x_i);
        y.push(m_i + e);
    }

    SimulationOutput { eps, theta, x, m, y, seed }
}

/// Autocovariance of the increments at lag `h`.
///
/// `gamma_X(0) = sigma2 (1 + b_c sum alpha_j^2)`, compactly supported:
/// zero beyond lag `p`.
pub fn cov_x(params: &SplitMaParams, h: usize) -> f64 {
    let p = params.order();
    let alphas = params.alphas();
    let b = params.b_c().value();
    let sigma2 = params.sigma2();
    if h == 0 {
        let sq: f64 = alphas.iter().map(|a| a * a).sum();
        sigma2 * (1.0 + b * sq)
    } else if h <= p {
        let cross: f64 = (1..=p - h).map(|j| alphas[j - 1] * alphas[j + h - 1]).sum();
        sigma2 * b * (cross - alphas[h - 1])
    } else {
        0.0
    }
}

/// Sum of the increment autocovariances over all lags, which collapses
/// to `sigma2 * (1 - b_c)` in the integrated case.
///
/// Fails unless `sum(alpha) = 1`.
pub fn cov_sum(params: &SplitMaParams) -> Result<f64> {
    if !params.is_integrated() {
        return Err(Error::Precondition("cov_sum requires the integrated case sum(alpha) = 1"));
    }
    Ok(params.sigma2() * (1.0 - params.b_c().value()))
}

/// Lag-1 autocorrelation of the integrated Split-MA(1) process,
/// `rho(1) = -b_c / (1 + b_c)`, always inside `(-1/2, 0)`.
///
/// Fails unless `p = 1` and `alpha_1 = 1`.
pub fn acf1(params: &SplitMaParams) -> Result<f64> {
    if params.order() != 1 || (params.alphas()[0] - 1.0).abs() > INTEGRATED_TOL {
        return Err(Error::Precondition("acf1 requires p = 1 and alpha_1 = 1"));
    }
    let b = params.b_c().value();
    Ok(-b / (1.0 + b))
}

/// Autocovariance function `gamma_Y(0..=h_max)` of the stationary level
/// series.
///
/// Conditioning on the innovation shared by a level and the switched
/// term at matching lag gives, with `gamma(-h) = gamma(h)`,
///
/// ```text
/// gamma(0) = sum_j alpha_j gamma(j) + sigma2,
/// gamma(h) = sum_j alpha_j gamma(|h-j|) - alpha_h b_c sigma2   (1 <= h <= p),
/// gamma(h) = sum_j alpha_j gamma(h-j)                          (h > p);
/// ```
///
/// the interaction terms at deeper lags cancel because the level
/// correlates identically with an innovation whether or not the
/// indicator passed it through. Lags `0..=p` are solved as one dense
/// linear system; larger lags follow by recursion. Fails unless
/// `sum(alpha) < 1`.
pub fn cov_y(params: &SplitMaParams, h_max: usize) -> Result<Vec<f64>> {
    if !params.is_stationary() {
        return Err(Error::Precondition("cov_y requires the stationary case sum(alpha) < 1"));
    }
    let p = params.order();
    let alphas = params.alphas();
    let sigma2 = params.sigma2();
    let switched_var = params.b_c().value() * sigma2;

    let n = p + 1;
    let mut a = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    for h in 0..=p {
        a[h * n + h] += 1.0;
        for j in 1..=p {
            let lag = (h as i64 - j as i64).unsigned_abs() as usize;
            a[h * n + lag] -= alphas[j - 1];
        }
        rhs[h] = if h == 0 { sigma2 } else { -alphas[h - 1] * switched_var };
    }
    solve_dense(&mut a, &mut rhs, n)?;

    let mut gamma = rhs;
    for h in p + 1..=h_max {
        let next = (1..=p).map(|j| alphas[j - 1] * gamma[h - j]).sum();
        gamma.push(next);
    }
    gamma.truncate(h_max + 1);
    Ok(gamma)
}

fn presample_eps(time: i64, eps_init: &[f64]) -> f64 {
    debug_assert!(time <= 0);
    let back = (-time) as usize;
    if back < eps_init.len() {
        eps_init[back]
    } else {
        0.0
    }
}

/// Reconstructs the innovations from an increment series by running the
/// defining recursion forward: `eps_t = x_t + sum_j alpha_j theta_{t-j}
/// eps_{t-j}`, with indicators re-derived from the reconstructed values.
///
/// `eps_init` supplies `(eps_0, eps_{-1}, ..., eps_{1-p})`; values deeper
/// in the past are taken as zero. Applied to [`simulate`] output with a
/// zero `eps_init` this reproduces the simulated innovations exactly.
/// Fails unless `b_c * sum(alpha) < 1`.
pub fn invert(params: &SplitMaParams, x: &[f64], eps_init: &[f64]) -> Result<Vec<f64>> {
    if !params.is_invertible() {
        return Err(Error::Precondition("invert requires invertibility b_c * sum(alpha) < 1"));
    }
    let p = params.order();
    if eps_init.len() != p {
        return Err(Error::Precondition("eps_init must supply exactly p pre-sample values"));
    }
    let alphas = params.alphas();
    let c = params.critical_value();

    let mut eps: Vec<f64> = Vec::with_capacity(x.len());
    for (i, &x_i) in x.iter().enumerate() {
        let t = (i + 1) as i64;
        let mut e = x_i;
        for j in 1..=p {
            let s = t - j as i64;
            let (eps_s, eps_prev) = if s >= 1 {
                let prev = if s >= 2 { eps[(s - 2) as usize] } else { presample_eps(0, eps_init) };
                (eps[(s - 1) as usize], prev)
            } else {
                (presample_eps(s, eps_init), presample_eps(s - 1, eps_init))
            };
            if eps_prev * eps_prev <= c {
                e += alphas[j - 1] * eps_s;
            }
        }
        eps.push(e);
    }
    Ok(eps)
}

/// Weights of the moving-average representation of the innovations,
/// `eps_t = sum_k omega_k(t) x_{t-k}`, for `k = 0..=k_max`.
///
/// `theta` must cover `theta_{t-k_max}..=theta_t`, most recent last.
/// `omega_0 = 1`; each later weight multiplies an alpha-combination of
/// its predecessors by the indicator at its own lag, so a single zero
/// indicator annihilates all deeper weights when `p = 1`.
pub fn omega_weights(params: &SplitMaParams, theta: &[bool], k_max: usize) -> Result<Vec<f64>> {
    if theta.len() < k_max + 1 {
        return Err(Error::TooShort { needed: k_max + 1, got: theta.len() });
    }
    let p = params.order();
    let alphas = params.alphas();
    let last = theta.len() - 1;

    let mut omega = Vec::with_capacity(k_max + 1);
    omega.push(1.0);
    for k in 1..=k_max {
        let theta_k = theta[last - k];
        let w = if theta_k {
            (1..=k.min(p)).map(|j| alphas[j - 1] * omega[k - j]).sum()
        } else {
            0.0
        };
        omega.push(w);
    }
    Ok(omega)
}

/// Splits an observed level series into martingale means and residual
/// innovations for the integrated order-1 model, starting the recursion
/// at the empirical mean of `y`.
///
/// Initial values `eps_1 = eps_0 = 0`, then for `t = 2..T`:
/// `m_t = m_{t-1} + eps_{t-1} I(eps_{t-2}^2 > c_hat)` and
/// `eps_t = y_t - m_t`.
pub fn reconstruct_martingale(y: &[f64], c_hat: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if y.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: y.len() });
    }
    let m1 = y.iter().sum::<f64>() / y.len() as f64;
    reconstruct_martingale_from(y, c_hat, m1)
}

/// Same recursion as [`reconstruct_martingale`] with an explicit
/// starting mean `m1`.
pub fn reconstruct_martingale_from(y: &[f64], c_hat: f64, m1: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if y.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: y.len() });
    }
    if c_hat.is_nan() || c_hat < 0.0 {
        return Err(Error::Domain("c_hat must be non-negative"));
    }
    let t_len = y.len();
    let mut m = Vec::with_capacity(t_len);
    let mut eps = Vec::with_capacity(t_len);
    m.push(m1);
    eps.push(0.0);
    for i in 1..t_len {
        let shock = if i >= 2 { eps[i - 2] } else { 0.0 };
        let step = if shock * shock > c_hat { eps[i - 1] } else { 0.0 };
        let m_i = m[i - 1] + step;
        m.push(m_i);
        eps.push(y[i] - m_i);
    }
    Ok((m, eps))
}
