//! Fixed-width text tables for study and fit reports.

use gsb::mc::{Estimator, McReport, Parameter};

use crate::pipeline::FitReport;

fn stat(value: f64) -> String {
    format!("{value:.4}")
}

fn sci(value: f64) -> String {
    format!("{value:.2E}")
}

fn row(label1: &str, label2: &str, cells: &[String]) -> String {
    let mut line = format!("{label1:<9} {label2:<9}");
    for cell in cells {
        line.push_str(&format!(" {cell:>12}"));
    }
    line.push('\n');
    line
}

fn estimator_headers(weights: &[u8]) -> Vec<String> {
    std::iter::once("initial".to_string())
        .chain(weights.iter().map(|k| format!("g{k}")))
        .collect()
}

fn estimators(weights: &[u8]) -> Vec<Estimator> {
    std::iter::once(Estimator::Initial)
        .chain(weights.iter().map(|&k| Estimator::Ecf(k)))
        .collect()
}

const PARAMETERS: [Parameter; 3] = [Parameter::BC, Parameter::C, Parameter::Sigma2];

/// Summary table: TRUE / MIN / MEAN / MAX / BIAS / RMSE per parameter,
/// one column per estimator.
pub fn mc_summary_table(report: &McReport) -> String {
    let mut out = String::new();
    let headers = estimator_headers(&report.weights);
    out.push_str(&row("parameter", "statistic", &headers));
    let ests = estimators(&report.weights);
    for parameter in PARAMETERS {
        let cells =
            |pick: &dyn Fn(&gsb::mc::SummaryRow) -> String| -> Vec<String> {
                ests.iter()
                    .map(|&e| pick(&report.cell(e, parameter).summary))
                    .collect()
            };
        out.push_str(&row(&parameter.to_string(), "TRUE", &cells(&|s| stat(s.true_value))));
        out.push_str(&row("", "MIN", &cells(&|s| stat(s.min))));
        out.push_str(&row("", "MEAN", &cells(&|s| stat(s.mean))));
        out.push_str(&row("", "MAX", &cells(&|s| stat(s.max))));
        out.push_str(&row("", "BIAS", &cells(&|s| sci(s.bias))));
        out.push_str(&row("", "RMSE", &cells(&|s| stat(s.rmse))));
    }
    out.push_str(&format!(
        "sample size T = {}, replications used = {} (infeasible dropped: {})\n",
        report.t_len, report.reps_used, report.failed_reps
    ));
    out
}

/// Normality-test table: AD / W / JB statistics with p-values.
pub fn mc_normality_table(report: &McReport) -> String {
    let mut out = String::new();
    let headers = estimator_headers(&report.weights);
    out.push_str(&row("parameter", "statistic", &headers));
    let ests = estimators(&report.weights);
    for parameter in PARAMETERS {
        let cells = |pick: &dyn Fn(&gsb::mc::NormalityRow) -> String| -> Vec<String> {
            ests.iter()
                .map(|&e| {
                    report
                        .cell(e, parameter)
                        .normality
                        .as_ref()
                        .map_or_else(|| "--".to_string(), pick)
                })
                .collect()
        };
        out.push_str(&row(&parameter.to_string(), "AD", &cells(&|n| stat(n.ad_stat))));
        out.push_str(&row("", "(p-value)", &cells(&|n| format!("({:.4})", n.ad_p))));
        out.push_str(&row("", "W", &cells(&|n| stat(n.cvm_stat))));
        out.push_str(&row("", "(p-value)", &cells(&|n| format!("({:.4})", n.cvm_p))));
        out.push_str(&row("", "JB", &cells(&|n| stat(n.jb_stat))));
        out.push_str(&row("", "(p-value)", &cells(&|n| format!("({:.4})", n.jb_p))));
    }
    out
}

/// Fit table: estimated parameters and objective values, one column per
/// estimator.
pub fn fit_table(report: &FitReport) -> String {
    let mut out = String::new();
    let weights: Vec<u8> = report.fits.iter().map(|f| f.weight).collect();
    let headers = estimator_headers(&weights);
    out.push_str(&row("quantity", "", &headers));

    let dashes = |first: String| -> Vec<String> {
        std::iter::once(first)
            .chain(report.fits.iter().map(|_| "--".to_string()))
            .collect()
    };
    out.push_str(&row("rho1", "", &dashes(stat(report.mom.rho1_hat))));

    let line = |pick_init: f64, pick: &dyn Fn(&crate::pipeline::WeightFit) -> f64| -> Vec<String> {
        std::iter::once(stat(pick_init))
            .chain(report.fits.iter().map(|f| stat(pick(f))))
            .collect()
    };
    out.push_str(&row(
        "b_c",
        "",
        &line(report.mom.b_c_hat.value(), &|f| f.estimate.b_c_hat.value()),
    ));
    out.push_str(&row("c", "", &line(report.mom.c_hat, &|f| f.estimate.c_hat)));
    out.push_str(&row(
        "sigma2",
        "",
        &line(report.mom.sigma2_hat, &|f| f.estimate.sigma2_hat),
    ));
    let objective_cells: Vec<String> = std::iter::once(sci(report.objective_at_init))
        .chain(report.fits.iter().map(|f| sci(f.estimate.objective)))
        .collect();
    out.push_str(&row("S_T(2)", "", &objective_cells));
    out
}
