//! Error type shared by the model and estimation layers.

use core::fmt;

/// Errors produced by this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the mathematical domain of the function.
    Domain(&'static str),
    /// A structural precondition on the model parameters was violated
    /// (non-negativity, stationarity, invertibility, ...).
    Precondition(&'static str),
    /// A series was shorter than the operation requires.
    TooShort { needed: usize, got: usize },
    /// The lag-1 sample autocorrelation fell outside `(-1/2, 0)`, the
    /// region on which the moment estimator of `b_c` is defined.
    Infeasible { rho1: f64 },
    /// The symmetric tridiagonal eigenproblem behind a quadrature rule
    /// failed to converge.
    QuadratureBreakdown,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::TooShort { needed, got } => {
                write!(f, "series too short: need at least {needed} values, got {got}")
            }
            Error::Infeasible { rho1 } => write!(
                f,
                "lag-1 sample autocorrelation {rho1} outside (-0.5, 0); \
                 moment estimator of b_c is undefined"
            ),
            Error::QuadratureBreakdown => {
                write!(f, "quadrature construction failed: eigenproblem did not converge")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
