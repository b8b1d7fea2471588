//! Simulation and estimation toolkit for the Gaussian Split-BREAK (GSB)
//! process and its Split-MA increment process.
//!
//! A GSB series switches between a random-walk-like and a mean-reverting
//! regime through a noise indicator: a past innovation enters the level
//! permanently only when its square exceeds a critical value `c`. The
//! first differences of the level form a Split-MA process, a moving
//! average whose lagged terms are randomly switched off by the indicator.
//!
//! The crate provides
//!
//! * exact simulation and inversion of GSB(p)/Split-MA(p) paths
//!   ([`model`]),
//! * closed-form characteristic functions of the increments, their
//!   moment recurrence, kurtosis and the order-1 density ([`charfn`]),
//! * a Gauss-Radau radial rule and the polar product cubature used to
//!   integrate over the plane against a Gaussian-type weight ([`quad`]),
//! * method-of-moments and empirical-characteristic-function parameter
//!   estimators ([`estim`]),
//! * a reproducible Monte Carlo replication harness with normality
//!   diagnostics ([`mc`]).
//!
//! The crate is `no_std` (with `alloc`); all transcendental functions
//! come from [`libm`], so results are bit-identical across platforms.
//! File formats, the command-line interface and parallel execution live
//! in the companion `gsb-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod charfn;
pub mod error;
pub mod estim;
mod linalg;
pub mod mc;
pub mod model;
pub mod quad;
pub mod rng;
pub mod statfun;

pub use error::{Error, Result};
pub use model::{SimulationOutput, SplitMaParams};
pub use statfun::Probability;
