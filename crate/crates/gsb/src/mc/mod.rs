//! Monte Carlo replication harness: repeated simulation and estimation
//! under a known truth, with per-parameter summary statistics and
//! normality diagnostics for every estimator.
//!
//! Replication `r` draws its innovations from the stream derived from
//! `(seed, r)`, so a report depends only on the configuration — never on
//! execution order. [`run_mc`] folds the replications sequentially; a
//! parallel driver can map [`run_replication`] over indices and feed the
//! ordered outcomes to [`assemble_report`] for an identical result.
//!
//! Replications whose moment step is infeasible (lag-1 autocorrelation
//! outside `(-1/2, 0)`) are dropped from the summaries and surfaced
//! through `failed_reps`.

mod normality;

pub use normality::{ad_test, cvm_test, jb_statistic, jb_test, MIN_TEST_LEN};

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::estim::{estimate_ecf, estimate_mom, EcfOptions};
use crate::model::{simulate, SplitMaParams};
use crate::quad::{build_cubature, gamma_for_weight, CubatureRule};
use crate::rng::substream_seed;

/// Configuration of one Monte Carlo study.
#[derive(Debug, Clone)]
pub struct McConfig {
    /// True parameter vector generating the data.
    pub theta0: SplitMaParams,
    /// Sample length per replication.
    pub t_len: usize,
    /// Number of replications.
    pub reps: usize,
    /// Weight indices for the ECF estimators, each in `{1, 2, 3}`.
    pub weights: Vec<u8>,
    pub seed: u64,
    /// Interior radial nodes of the cubature (default 5).
    pub radial_n: usize,
    /// Angular nodes per quadrant (default 4; together with the default
    /// radial count this gives the 81-node rule).
    pub angular_m: usize,
    /// Monte Carlo replications behind each Jarque-Bera p-value.
    pub jb_mc_reps: usize,
    pub ecf_options: EcfOptions,
}

impl McConfig {
    pub fn new(theta0: SplitMaParams, t_len: usize, reps: usize, weights: Vec<u8>, seed: u64) -> Result<Self> {
        let config = Self {
            theta0,
            t_len,
            reps,
            weights,
            seed,
            radial_n: 5,
            angular_m: 4,
            jb_mc_reps: 2000,
            ecf_options: EcfOptions::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Precondition("reps must be at least 1"));
        }
        if self.t_len < 30 {
            return Err(Error::Precondition("sample length T must be at least 30"));
        }
        if self.weights.is_empty() {
            return Err(Error::Precondition("at least one weight index is required"));
        }
        for &k in &self.weights {
            gamma_for_weight(k)?;
        }
        Ok(())
    }

    /// One cubature rule per configured weight, in order.
    pub fn build_rules(&self) -> Result<Vec<CubatureRule>> {
        self.weights
            .iter()
            .map(|&k| build_cubature(gamma_for_weight(k)?, self.radial_n, self.angular_m))
            .collect()
    }
}

/// The three estimated parameters of one estimator in one replication.
#[derive(Debug, Clone, Copy)]
pub struct ParamTriple {
    pub b_c: f64,
    pub c: f64,
    pub sigma2: f64,
}

/// Estimates produced by a single replication: the moment estimator
/// plus one ECF estimate per configured weight.
#[derive(Debug, Clone)]
pub struct RepOutcome {
    pub mom: ParamTriple,
    pub ecf: Vec<ParamTriple>,
}

/// Runs replication `rep`: simulate, moment step, then one ECF fit per
/// weight. `Ok(None)` marks a feasibility failure of the moment step.
pub fn run_replication(
    config: &McConfig,
    rules: &[CubatureRule],
    rep: u64,
) -> Result<Option<RepOutcome>> {
    let rep_seed = substream_seed(config.seed, rep);
    let out = simulate(&config.theta0, config.t_len, rep_seed);
    let init = match estimate_mom(&out.x) {
        Ok(init) => init,
        Err(Error::Infeasible { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mom = ParamTriple {
        b_c: init.b_c_hat.value(),
        c: init.c_hat,
        sigma2: init.sigma2_hat,
    };
    let mut ecf = Vec::with_capacity(config.weights.len());
    for (rule, &k) in rules.iter().zip(&config.weights) {
        let est = estimate_ecf(&out.x, k, &init, rule, &config.ecf_options)?;
        ecf.push(ParamTriple {
            b_c: est.b_c_hat.value(),
            c: est.c_hat,
            sigma2: est.sigma2_hat,
        });
    }
    Ok(Some(RepOutcome { mom, ecf }))
}

/// MIN / MEAN / MAX / BIAS / RMSE of an estimate sample against the
/// truth.
#[derive(Debug, Clone, Copy)]
pub struct SummaryRow {
    pub true_value: f64,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub bias: f64,
    pub rmse: f64,
}

/// Summarises a non-empty estimate sample; `rmse` is the root of the
/// mean squared deviation from the truth, so `rmse >= |bias|`.
pub fn summarize(estimates: &[f64], true_value: f64) -> SummaryRow {
    assert!(!estimates.is_empty(), "summarize needs at least one estimate");
    let n = estimates.len() as f64;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut sq = 0.0;
    for &v in estimates {
        min = min.min(v);
        max = max.max(v);
        sum += v;
        sq += (v - true_value) * (v - true_value);
    }
    let mean = sum / n;
    SummaryRow {
        true_value,
        min,
        mean,
        max,
        bias: mean - true_value,
        rmse: libm::sqrt(sq / n),
    }
}

/// Normality diagnostics of one estimate sample.
#[derive(Debug, Clone, Copy)]
pub struct NormalityRow {
    pub ad_stat: f64,
    pub ad_p: f64,
    pub cvm_stat: f64,
    pub cvm_p: f64,
    pub jb_stat: f64,
    pub jb_p: f64,
}

/// Which estimator a report cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Method-of-moments initial estimator.
    Initial,
    /// ECF estimator under weight `g_k`.
    Ecf(u8),
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimator::Initial => write!(f, "initial"),
            Estimator::Ecf(k) => write!(f, "ecf_g{k}"),
        }
    }
}

/// Which model parameter a report cell tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    BC,
    C,
    Sigma2,
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parameter::BC => write!(f, "b_c"),
            Parameter::C => write!(f, "c"),
            Parameter::Sigma2 => write!(f, "sigma2"),
        }
    }
}

/// One `(estimator, parameter)` cell of the report, with the raw sample
/// kept for export and plotting.
#[derive(Debug, Clone)]
pub struct McCell {
    pub estimator: Estimator,
    pub parameter: Parameter,
    pub summary: SummaryRow,
    /// `None` when fewer than [`MIN_TEST_LEN`] replications survived.
    pub normality: Option<NormalityRow>,
    pub samples: Vec<f64>,
}

/// Full study report.
#[derive(Debug, Clone)]
pub struct McReport {
    pub cells: Vec<McCell>,
    pub t_len: usize,
    pub reps_requested: usize,
    /// Replications entering the summaries.
    pub reps_used: usize,
    /// Replications dropped for moment-step infeasibility.
    pub failed_reps: usize,
    pub weights: Vec<u8>,
    pub true_values: ParamTriple,
}

impl McReport {
    pub fn cell(&self, estimator: Estimator, parameter: Parameter) -> &McCell {
        self.cells
            .iter()
            .find(|c| c.estimator == estimator && c.parameter == parameter)
            .expect("report covers every configured estimator and parameter")
    }
}

/// Sequential driver: runs every replication and assembles the report.
pub fn run_mc(config: &McConfig) -> Result<McReport> {
    config.validate()?;
    let rules = config.build_rules()?;
    let outcomes = (0..config.reps as u64)
        .map(|rep| run_replication(config, &rules, rep))
        .collect::<Result<Vec<_>>>()?;
    assemble_report(config, outcomes)
}

/// Builds the report from replication outcomes listed in replication
/// order (the aggregation a parallel driver must also use).
pub fn assemble_report(config: &McConfig, outcomes: Vec<Option<RepOutcome>>) -> Result<McReport> {
    let failed_reps = outcomes.iter().filter(|o| o.is_none()).count();
    let kept: Vec<RepOutcome> = outcomes.into_iter().flatten().collect();
    if kept.is_empty() {
        return Err(Error::Precondition("every replication failed the feasibility check"));
    }

    let truth = ParamTriple {
        b_c: config.theta0.b_c().value(),
        c: config.theta0.critical_value(),
        sigma2: config.theta0.sigma2(),
    };

    let estimators: Vec<Estimator> = core::iter::once(Estimator::Initial)
        .chain(config.weights.iter().map(|&k| Estimator::Ecf(k)))
        .collect();
    let parameters = [Parameter::BC, Parameter::C, Parameter::Sigma2];

    let mut cells = Vec::with_capacity(estimators.len() * parameters.len());
    for (e_idx, &estimator) in estimators.iter().enumerate() {
        for &parameter in &parameters {
            let samples: Vec<f64> = kept
                .iter()
                .map(|o| {
                    let triple = match estimator {
                        Estimator::Initial => &o.mom,
                        Estimator::Ecf(_) => &o.ecf[e_idx - 1],
                    };
                    match parameter {
                        Parameter::BC => triple.b_c,
                        Parameter::C => triple.c,
                        Parameter::Sigma2 => triple.sigma2,
                    }
                })
                .collect();
            let true_value = match parameter {
                Parameter::BC => truth.b_c,
                Parameter::C => truth.c,
                Parameter::Sigma2 => truth.sigma2,
            };
            let summary = summarize(&samples, true_value);
            let normality = if samples.len() >= MIN_TEST_LEN {
                // own sub-stream per cell, disjoint from the replication streams
                let cell_tag = (e_idx * parameters.len() + parameter as usize) as u64;
                let jb_seed = substream_seed(config.seed, 0x4A42_0000 + cell_tag);
                let (ad_stat, ad_p) = ad_test(&samples)?;
                let (cvm_stat, cvm_p) = cvm_test(&samples)?;
                let (jb_stat, jb_p) = jb_test(&samples, config.jb_mc_reps, jb_seed)?;
                Some(NormalityRow { ad_stat, ad_p, cvm_stat, cvm_p, jb_stat, jb_p })
            } else {
                None
            };
            cells.push(McCell { estimator, parameter, summary, normality, samples });
        }
    }

    Ok(McReport {
        cells,
        t_len: config.t_len,
        reps_requested: config.reps,
        reps_used: kept.len(),
        failed_reps,
        weights: config.weights.clone(),
        true_values: truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn small_config(reps: usize) -> McConfig {
        let theta0 = SplitMaParams::integrated_ma1(0.6827, 1.0).unwrap();
        let mut config = McConfig::new(theta0, 150, reps, vec![1], 7).unwrap();
        config.jb_mc_reps = 200;
        config
    }

    #[test]
    fn summarize_reference_rows() {
        let row = summarize(&[1.0, 1.0, 1.0], 1.0);
        assert_eq!((row.min, row.mean, row.max), (1.0, 1.0, 1.0));
        assert_eq!(row.bias, 0.0);
        assert_eq!(row.rmse, 0.0);

        let row = summarize(&[0.0, 2.0], 1.0);
        assert_eq!(row.bias, 0.0);
        assert_eq!(row.rmse, 1.0);

        let row = summarize(&[1.0, 2.0, 3.0], 2.0);
        assert_eq!(row.mean, 2.0);
        assert!((row.rmse - libm::sqrt(2.0 / 3.0)).abs() < 1e-15);
        assert!(row.rmse >= row.bias.abs());
    }

    #[test]
    fn single_replication_collapses_summary() {
        let config = small_config(1);
        let report = run_mc(&config).unwrap();
        assert_eq!(report.reps_used + report.failed_reps, 1);
        for cell in &report.cells {
            if report.reps_used == 1 {
                let s = cell.summary;
                assert_eq!(s.min, s.mean);
                assert_eq!(s.mean, s.max);
                assert!((s.bias - (s.mean - s.true_value)).abs() < 1e-15);
                assert!((s.rmse - s.bias.abs()).abs() < 1e-15);
            }
            assert!(cell.normality.is_none());
        }
    }

    #[test]
    fn report_is_reproducible() {
        let config = small_config(12);
        let a = run_mc(&config).unwrap();
        let b = run_mc(&config).unwrap();
        assert_eq!(a.reps_used, b.reps_used);
        for (ca, cb) in a.cells.iter().zip(&b.cells) {
            assert_eq!(ca.samples, cb.samples);
            assert_eq!(ca.summary.rmse, cb.summary.rmse);
        }
    }

    #[test]
    fn assemble_matches_sequential_run() {
        let config = small_config(10);
        let rules = config.build_rules().unwrap();
        // simulate an out-of-order parallel execution: compute outcomes in
        // reverse, then order them by index before assembling
        let mut outcomes: Vec<(u64, Option<RepOutcome>)> = (0..10u64)
            .rev()
            .map(|rep| (rep, run_replication(&config, &rules, rep).unwrap()))
            .collect();
        outcomes.sort_unstable_by_key(|(rep, _)| *rep);
        let parallel = assemble_report(&config, outcomes.into_iter().map(|(_, o)| o).collect())
            .unwrap();
        let sequential = run_mc(&config).unwrap();
        for (ca, cb) in parallel.cells.iter().zip(&sequential.cells) {
            assert_eq!(ca.samples, cb.samples);
        }
    }

    #[test]
    fn report_layout_covers_all_cells() {
        let theta0 = SplitMaParams::integrated_ma1(0.6827, 1.0).unwrap();
        let mut config = McConfig::new(theta0, 150, 10, vec![1, 3], 99).unwrap();
        config.jb_mc_reps = 100;
        let report = run_mc(&config).unwrap();
        assert_eq!(report.cells.len(), 9); // (initial + 2 weights) x 3 parameters
        let cell = report.cell(Estimator::Ecf(3), Parameter::Sigma2);
        assert_eq!(cell.samples.len(), report.reps_used);
        // true critical value for theta0 is 1
        assert!((report.true_values.c - 1.0).abs() < 1e-3);
    }

    #[test]
    fn normality_rows_appear_with_enough_reps() {
        let config = small_config(12);
        let report = run_mc(&config).unwrap();
        if report.reps_used >= MIN_TEST_LEN {
            for cell in &report.cells {
                let row = cell.normality.as_ref().expect("normality row");
                assert!(row.ad_p >= 0.0 && row.ad_p <= 1.0);
                assert!(row.cvm_p >= 0.0 && row.cvm_p <= 1.0);
                assert!(row.jb_p > 0.0 && row.jb_p <= 1.0);
            }
        }
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let theta0 = SplitMaParams::integrated_ma1(0.6827, 1.0).unwrap();
        assert!(McConfig::new(theta0.clone(), 150, 0, vec![1], 1).is_err());
        assert!(McConfig::new(theta0.clone(), 10, 5, vec![1], 1).is_err());
        assert!(McConfig::new(theta0.clone(), 150, 5, vec![], 1).is_err());
        assert!(McConfig::new(theta0, 150, 5, vec![4], 1).is_err());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn summary_ordering_invariants(
            estimates in proptest::collection::vec(-1e6f64..1e6, 1..200),
            true_value in -1e6f64..1e6,
        ) {
            let row = summarize(&estimates, true_value);
            prop_assert!(row.min <= row.mean + 1e-9 * row.mean.abs().max(1.0));
            prop_assert!(row.mean <= row.max + 1e-9 * row.mean.abs().max(1.0));
            prop_assert!(row.rmse + 1e-9 * row.rmse.max(1.0) >= row.bias.abs());
        }
    }
}
