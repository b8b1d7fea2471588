//! Radial Gauss-Radau quadrature and the polar product cubature used to
//! integrate plane functions against the Gaussian-type weight
//! `exp(-gamma (u1^2 + u2^2))`.
//!
//! In polar coordinates such an integral reduces to
//!
//! ```text
//! I(f) = Int_0^inf r e^{-gamma r^2} S(r) dr,
//! S(r) = Int_{-pi}^{pi} f(r cos a, r sin a) da,
//! ```
//!
//! so the plane rule is the product of a radial Gauss-Radau formula
//! (one node fixed at `r = 0`) with the composite trapezoidal rule on
//! the circle, which is exact-by-symmetry in `4m` equispaced angles.
//!
//! The radial rule is built from the generalized Laguerre connection:
//! substituting `s = gamma r^2` maps the base measure
//! `r e^{-gamma r^2} dr` to `e^{-s} ds / (2 gamma)`, and angular
//! averages of smooth plane functions are even in `r`, i.e. polynomial
//! in `s`. The fixed node at `r = 0` is the standard end-point
//! modification in the `s` variable: interior nodes come from the
//! zero-augmented weight `s e^{-s}` (Laguerre with parameter 1) via the
//! Golub-Welsch eigenproblem, and the fixed node receives the mass
//! remainder.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::sym_tridiag_eigen;

/// Exponential rate of the plane weight `g_k = exp(-k (u1^2 + u2^2) / 2)`
/// for a weight index `k` in `{1, 2, 3}`: the radial density is
/// `r e^{-gamma r^2}` with `gamma = k / 2`.
pub fn gamma_for_weight(k: u8) -> Result<f64> {
    if (1..=3).contains(&k) {
        Ok(k as f64 / 2.0)
    } else {
        Err(Error::Domain("weight index k must be 1, 2 or 3"))
    }
}

/// Radial Gauss-Radau rule for `Int_0^inf r e^{-gamma r^2} S(r) dr`
/// with `n` interior nodes plus the fixed node `r_0 = 0`.
///
/// Exact for even polynomial profiles `S(r) = poly(r^2)` of degree up
/// to `4n` — twice the usual Radau degree, because the rule lives in
/// the squared-radius variable.
#[derive(Debug, Clone)]
pub struct RadialRule {
    gamma: f64,
    /// `r_0 = 0 < r_1 < ... < r_n`.
    nodes: Vec<f64>,
    /// Positive weights `A_0, ..., A_n` summing to `1 / (2 gamma)`.
    weights: Vec<f64>,
}

impl RadialRule {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of interior nodes `n`.
    pub fn interior_len(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Applies the rule to a radial profile.
    pub fn integrate<S: Fn(f64) -> f64>(&self, s: S) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &a)| a * s(r)).sum()
    }
}

/// Builds the radial rule for rate `gamma > 0` with `n >= 1` interior
/// nodes.
///
/// In `s = gamma r^2` the target is `Int_0^inf e^{-s} S(sqrt(s/gamma))
/// ds / (2 gamma)`. Interior nodes are the Gauss nodes of the
/// zero-augmented weight `s e^{-s}`; writing `S_hat(s) = S_hat(0) +
/// s Q(s)` gives the interior weights `A_k = lambda_k / (2 gamma s_k)`
/// and the fixed-node weight as the remainder against the total mass
/// `1 / (2 gamma)`.
pub fn build_radial(gamma: f64, n: usize) -> Result<RadialRule> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain("gamma must be finite and positive"));
    }
    if n == 0 {
        return Err(Error::Domain("the radial rule needs at least one interior node"));
    }

    // Laguerre(alpha = 1) Jacobi matrix: diag 2i + alpha + 1,
    // sub-diagonal sqrt(i (i + alpha)).
    const ALPHA: f64 = 1.0;
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + ALPHA + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|i| libm::sqrt(i as f64 * (i as f64 + ALPHA))).collect();
    let (s_nodes, firsts) = sym_tridiag_eigen(diag, off)?;

    // total mass of s e^{-s} is Gamma(2) = 1
    let mu0 = 1.0;
    let base_mass = 1.0 / (2.0 * gamma);

    let mut nodes = Vec::with_capacity(n + 1);
    let mut weights = Vec::with_capacity(n + 1);
    nodes.push(0.0);
    weights.push(0.0); // placeholder for the fixed node
    let mut interior_sum = 0.0;
    for (s, z) in s_nodes.iter().zip(&firsts) {
        if s.is_nan() || *s <= 0.0 {
            return Err(Error::QuadratureBreakdown);
        }
        let lambda = mu0 * z * z;
        let a = base_mass * lambda / s;
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::QuadratureBreakdown);
        }
        nodes.push(libm::sqrt(s / gamma));
        weights.push(a);
        interior_sum += a;
    }
    let a0 = base_mass - interior_sum;
    if a0.is_nan() || a0 <= 0.0 {
        return Err(Error::QuadratureBreakdown);
    }
    weights[0] = a0;

    for w in nodes.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::QuadratureBreakdown);
        }
    }

    Ok(RadialRule { gamma, nodes, weights })
}

/// Planar cubature rule with `4 m n + 1` nodes: the origin plus `n`
/// rings of `4 m` equispaced angular positions.
///
/// The node set is invariant under quarter-turn rotations, the weights
/// are positive, and their total is `pi / gamma` (the plane mass of
/// `e^{-gamma r^2}`).
#[derive(Debug, Clone)]
pub struct CubatureRule {
    gamma: f64,
    radial_n: usize,
    angular_m: usize,
    points: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl CubatureRule {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn radial_n(&self) -> usize {
        self.radial_n
    }

    pub fn angular_m(&self) -> usize {
        self.angular_m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule: `sum_j w_j f(u1_j, u2_j)`.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&(u1, u2), &w)| w * f(u1, u2))
            .sum()
    }
}

/// Builds the product cubature for rate `gamma` from `n` radial and
/// `4 m` angular nodes. The default study configuration `n = 5, m = 4`
/// yields 81 nodes.
pub fn build_cubature(gamma: f64, n: usize, m: usize) -> Result<CubatureRule> {
    if m == 0 {
        return Err(Error::Domain("the angular rule needs at least one node per quadrant"));
    }
    let radial = build_radial(gamma, n)?;

    let count = 4 * m * n + 1;
    let mut points = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);

    points.push((0.0, 0.0));
    weights.push(2.0 * PI * radial.weights()[0]);

    let ring_weight = PI / (2.0 * m as f64);
    for k in 1..=n {
        let r = radial.nodes()[k];
        let a = radial.weights()[k];
        let w = ring_weight * a;
        for nu in 1..=m {
            let angle = nu as f64 * PI / (2.0 * m as f64);
            let x = r * libm::cos(angle);
            let y = r * libm::sin(angle);
            points.push((x, y));
            points.push((-x, -y));
            points.push((y, -x));
            points.push((-y, x));
            weights.extend_from_slice(&[w, w, w, w]);
        }
    }

    Ok(CubatureRule { gamma, radial_n: n, angular_m: m, points, weights })
}

/// Free-function form of [`CubatureRule::integrate`].
pub fn integrate<F: Fn(f64, f64) -> f64>(rule: &CubatureRule, f: F) -> f64 {
    rule.integrate(f)
}
