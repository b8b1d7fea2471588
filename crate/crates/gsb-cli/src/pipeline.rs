//! Command implementations: simulation and estimation drivers, the
//! fitting pipeline for empirical level/volume series, Monte Carlo
//! study execution and file emission.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use gsb::charfn::pdf_x;
use gsb::estim::{
    ecf_at_nodes, estimate_ecf_precomputed, estimate_mom, objective_s2, EcfEstimate, EcfOptions,
    MomEstimate,
};
use gsb::mc::{assemble_report, run_replication, McConfig, McReport};
use gsb::model::{reconstruct_martingale, simulate, SimulationOutput, SplitMaParams};
use gsb::quad::{build_cubature, gamma_for_weight, CubatureRule};

use crate::config::StudyConfig;
use crate::csv_io::{self, fmt_f64, read_columns, write_atomic, Columns};
use crate::error::{CliError, CliResult};
use crate::kde::{density_grid, GaussianKde};
use crate::table;

#[derive(Parser)]
#[command(
    name = "gsb",
    version,
    about = "Simulation and estimation toolkit for Gaussian Split-BREAK processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Simulate a GSB(p) path and write the aligned series as CSV
    Simulate(SimulateArgs),
    /// Moment and ECF estimates from an increment series
    Estimate(EstimateArgs),
    /// Run a Monte Carlo study from a config file and emit its tables
    McTable(McTableArgs),
    /// Full fitting pipeline: levels -> increments -> estimates ->
    /// reconstruction -> densities
    Fit(FitArgs),
    /// Split a level series into martingale means and residuals
    Reconstruct(ReconstructArgs),
    /// Dump cubature nodes and weights as CSV
    CubatureDump(CubatureDumpArgs),
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Coefficient alpha_j; repeat the flag for higher model orders
    #[arg(long = "alpha")]
    pub alphas: Vec<f64>,
    /// Indicator probability b_c in (0, 1)
    #[arg(long = "b-c")]
    pub b_c: f64,
    /// Innovation variance
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Sample length T
    #[arg(long = "len")]
    pub t_len: usize,
    /// RNG seed (stochastic commands never seed from the clock)
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EstimateArgs {
    /// CSV file holding the increment series
    #[arg(long)]
    pub input: PathBuf,
    /// Column name or 0-based index (defaults to 'x', or the only column)
    #[arg(long)]
    pub column: Option<String>,
    /// Weight index k in {1,2,3}; repeat for several fits
    #[arg(long = "weight")]
    pub weights: Vec<u8>,
    #[arg(long = "radial-n", default_value_t = 5)]
    pub radial_n: usize,
    #[arg(long = "angular-m", default_value_t = 4)]
    pub angular_m: usize,
    /// Optional report CSV path; the table always goes to stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct McTableArgs {
    /// Key-value study configuration file
    #[arg(long)]
    pub config: PathBuf,
    /// Flag overrides; flags win over file values
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long = "len")]
    pub t_len: Option<usize>,
    #[arg(long = "weight")]
    pub weights: Vec<u8>,
    #[arg(long)]
    pub parallel: Option<bool>,
    /// Output prefix: writes <prefix>_summary.csv, <prefix>_normality.csv
    /// and <prefix>_samples.csv
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputMode {
    /// The column already holds the level series
    Levels,
    /// The column holds first differences; levels are their cumulative sum
    Increments,
    /// Columns alternate price,volume pairs; levels are log total values
    LogVolumes,
}

#[derive(Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputMode::Levels)]
    pub mode: InputMode,
    /// Column name or 0-based index for levels/increments modes
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long = "weight")]
    pub weights: Vec<u8>,
    /// Weight whose estimate drives reconstruction and the fitted
    /// density (defaults to the first requested weight)
    #[arg(long = "recon-weight")]
    pub recon_weight: Option<u8>,
    #[arg(long = "radial-n", default_value_t = 5)]
    pub radial_n: usize,
    #[arg(long = "angular-m", default_value_t = 4)]
    pub angular_m: usize,
    /// Output prefix: writes <prefix>_report.csv, <prefix>_recon.csv and
    /// <prefix>_density.csv
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ReconstructArgs {
    /// CSV file holding the level series
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub column: Option<String>,
    /// Critical-value estimate driving the indicator
    #[arg(long = "c-hat")]
    pub c_hat: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CubatureDumpArgs {
    #[arg(long, default_value_t = 1)]
    pub weight: u8,
    #[arg(long = "radial-n", default_value_t = 5)]
    pub radial_n: usize,
    #[arg(long = "angular-m", default_value_t = 4)]
    pub angular_m: usize,
    /// Output CSV; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(args) => run_simulate(&args),
        Command::Estimate(args) => run_estimate(&args),
        Command::McTable(args) => run_mc_table(&args),
        Command::Fit(args) => run_fit(&args),
        Command::Reconstruct(args) => run_reconstruct(&args),
        Command::CubatureDump(args) => run_cubature_dump(&args),
    }
}

fn default_weights(weights: &[u8]) -> Vec<u8> {
    if weights.is_empty() {
        vec![1, 2, 3]
    } else {
        weights.to_vec()
    }
}

fn pick_column<'a>(
    columns: &'a Columns,
    flag: &Option<String>,
    preferred: &str,
) -> CliResult<&'a [f64]> {
    if let Some(key) = flag {
        return columns.column(key);
    }
    if columns.names.iter().any(|n| n == preferred) {
        return columns.column(preferred);
    }
    if columns.data.len() == 1 {
        return Ok(&columns.data[0]);
    }
    Err(CliError::input(format!(
        "--column is required: no column named '{preferred}' among {}",
        columns.names.join(", ")
    )))
}

// ---------------------------------------------------------------- simulate

pub fn run_simulate(args: &SimulateArgs) -> CliResult<()> {
    let alphas = if args.alphas.is_empty() { vec![1.0] } else { args.alphas.clone() };
    let params = SplitMaParams::new(alphas, args.b_c, args.sigma2)?;
    let out = simulate(&params, args.t_len, args.seed);
    write_simulation(&args.out, &out)?;
    println!(
        "wrote {} rows to {} (seed {})",
        args.t_len,
        args.out.display(),
        args.seed
    );
    Ok(())
}

pub fn write_simulation(path: &Path, out: &SimulationOutput) -> CliResult<()> {
    let body = csv_io::render_csv(
        &["t", "eps", "theta", "x", "m", "y"],
        (0..out.eps.len()).map(|t| {
            vec![
                (t + 1).to_string(),
                fmt_f64(out.eps[t]),
                u8::from(out.theta[t]).to_string(),
                fmt_f64(out.x[t]),
                fmt_f64(out.m[t]),
                fmt_f64(out.y[t]),
            ]
        }),
    );
    write_atomic(path, &body)
}

// ---------------------------------------------------------------- estimate

/// One ECF fit plus the objective value at its starting point.
#[derive(Debug, Clone)]
pub struct WeightFit {
    pub weight: u8,
    pub estimate: EcfEstimate,
    pub objective_at_init: f64,
}

/// Everything the `estimate` and `fit` tables need.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub mom: MomEstimate,
    pub fits: Vec<WeightFit>,
    /// Objective at the moment estimate under the first weight's rule.
    pub objective_at_init: f64,
}

/// Moment step plus one ECF minimisation per weight on an increment
/// series.
pub fn estimate_increments(
    x: &[f64],
    weights: &[u8],
    radial_n: usize,
    angular_m: usize,
) -> CliResult<FitReport> {
    let mom = estimate_mom(x)?;
    let opts = EcfOptions::default();
    let mut fits = Vec::with_capacity(weights.len());
    for &k in weights {
        let rule = build_cubature(gamma_for_weight(k)?, radial_n, angular_m)?;
        let nodes = ecf_at_nodes(x, &rule)?;
        let objective_at_init =
            objective_s2(mom.b_c_hat.value(), mom.sigma2_hat, &nodes, &rule);
        let estimate = estimate_ecf_precomputed(&nodes, k, &mom, &rule, &opts)?;
        fits.push(WeightFit { weight: k, estimate, objective_at_init });
    }
    let objective_at_init = fits.first().map_or(0.0, |f| f.objective_at_init);
    Ok(FitReport { mom, fits, objective_at_init })
}

fn report_csv(report: &FitReport) -> String {
    let mut header: Vec<String> = vec!["quantity".into(), "initial".into()];
    header.extend(report.fits.iter().map(|f| format!("g{}", f.weight)));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();

    let line = |name: &str, init: String, cells: Vec<String>| -> Vec<String> {
        let mut row = vec![name.to_string(), init];
        row.extend(cells);
        row
    };
    let rows = vec![
        line(
            "rho1",
            fmt_f64(report.mom.rho1_hat),
            report.fits.iter().map(|_| String::new()).collect(),
        ),
        line(
            "b_c",
            fmt_f64(report.mom.b_c_hat.value()),
            report.fits.iter().map(|f| fmt_f64(f.estimate.b_c_hat.value())).collect(),
        ),
        line(
            "c",
            fmt_f64(report.mom.c_hat),
            report.fits.iter().map(|f| fmt_f64(f.estimate.c_hat)).collect(),
        ),
        line(
            "sigma2",
            fmt_f64(report.mom.sigma2_hat),
            report.fits.iter().map(|f| fmt_f64(f.estimate.sigma2_hat)).collect(),
        ),
        line(
            "s_t2",
            fmt_f64(report.objective_at_init),
            report.fits.iter().map(|f| fmt_f64(f.estimate.objective)).collect(),
        ),
    ];
    csv_io::render_csv(&header_refs, rows.into_iter())
}

pub fn run_estimate(args: &EstimateArgs) -> CliResult<()> {
    let columns = read_columns(&args.input)?;
    let x = pick_column(&columns, &args.column, "x")?;
    let weights = default_weights(&args.weights);
    let report = estimate_increments(x, &weights, args.radial_n, args.angular_m)?;
    print!("{}", table::fit_table(&report));
    if let Some(path) = &args.out {
        write_atomic(path, &report_csv(&report))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- mc-table

/// Applies flag overrides and runs the study, in parallel when asked.
/// Replication streams derive from `(seed, index)`, so the parallel and
/// sequential paths produce identical reports.
pub fn run_study(study: &StudyConfig) -> CliResult<McReport> {
    let params = SplitMaParams::new(study.alphas.clone(), study.b_c, study.sigma2)?;
    let seed = study.seed.ok_or_else(|| {
        CliError::input("a seed is required: set 'seed' in the config or pass --seed")
    })?;
    let mut config = McConfig::new(params, study.t_len, study.reps, study.weights.clone(), seed)?;
    config.radial_n = study.radial_n;
    config.angular_m = study.angular_m;
    config.jb_mc_reps = study.jb_mc_reps;

    let rules = config.build_rules()?;
    let outcomes = if study.parallel {
        (0..config.reps as u64)
            .into_par_iter()
            .map(|rep| run_replication(&config, &rules, rep))
            .collect::<gsb::Result<Vec<_>>>()?
    } else {
        (0..config.reps as u64)
            .map(|rep| run_replication(&config, &rules, rep))
            .collect::<gsb::Result<Vec<_>>>()?
    };
    Ok(assemble_report(&config, outcomes)?)
}

fn mc_summary_csv(report: &McReport) -> String {
    let header = [
        "estimator", "parameter", "true", "min", "mean", "max", "bias", "rmse",
    ];
    csv_io::render_csv(
        &header,
        report.cells.iter().map(|cell| {
            let s = cell.summary;
            vec![
                cell.estimator.to_string(),
                cell.parameter.to_string(),
                fmt_f64(s.true_value),
                fmt_f64(s.min),
                fmt_f64(s.mean),
                fmt_f64(s.max),
                fmt_f64(s.bias),
                fmt_f64(s.rmse),
            ]
        }),
    )
}

fn mc_normality_csv(report: &McReport) -> String {
    let header = ["estimator", "parameter", "ad", "ad_p", "cvm", "cvm_p", "jb", "jb_p"];
    csv_io::render_csv(
        &header,
        report.cells.iter().map(|cell| {
            let mut row = vec![cell.estimator.to_string(), cell.parameter.to_string()];
            match &cell.normality {
                Some(n) => row.extend([
                    fmt_f64(n.ad_stat),
                    fmt_f64(n.ad_p),
                    fmt_f64(n.cvm_stat),
                    fmt_f64(n.cvm_p),
                    fmt_f64(n.jb_stat),
                    fmt_f64(n.jb_p),
                ]),
                None => row.extend(std::iter::repeat_n(String::new(), 6)),
            }
            row
        }),
    )
}

fn mc_samples_csv(report: &McReport) -> String {
    let names: Vec<String> = report
        .cells
        .iter()
        .map(|c| format!("{}_{}", c.estimator, c.parameter))
        .collect();
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    let rows = (0..report.reps_used).map(|i| {
        report.cells.iter().map(|c| fmt_f64(c.samples[i])).collect()
    });
    csv_io::render_csv(&header, rows)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    prefix.with_file_name(name)
}

pub fn run_mc_table(args: &McTableArgs) -> CliResult<()> {
    let mut study = StudyConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        study.seed = Some(seed);
    }
    if let Some(reps) = args.reps {
        study.reps = reps;
    }
    if let Some(t_len) = args.t_len {
        study.t_len = t_len;
    }
    if !args.weights.is_empty() {
        for &k in &args.weights {
            if !(1..=3).contains(&k) {
                return Err(CliError::input(format!(
                    "--weight accepts only 1, 2 or 3, found {k}"
                )));
            }
        }
        study.weights = args.weights.clone();
    }
    if let Some(parallel) = args.parallel {
        study.parallel = parallel;
    }

    let report = run_study(&study)?;
    print!("{}", table::mc_summary_table(&report));
    println!();
    print!("{}", table::mc_normality_table(&report));

    write_atomic(&with_suffix(&args.out, "_summary.csv"), &mc_summary_csv(&report))?;
    write_atomic(&with_suffix(&args.out, "_normality.csv"), &mc_normality_csv(&report))?;
    write_atomic(&with_suffix(&args.out, "_samples.csv"), &mc_samples_csv(&report))?;
    Ok(())
}

// ---------------------------------------------------------------- fit

/// Minimum level-series length: the estimation minimum plus one for
/// differencing.
pub const MIN_LEVEL_LEN: usize = gsb::estim::MIN_SAMPLE_LEN + 1;

/// Builds the level series according to the input mode.
pub fn levels_from_input(
    columns: &Columns,
    mode: InputMode,
    column: &Option<String>,
) -> CliResult<Vec<f64>> {
    match mode {
        InputMode::Levels => Ok(pick_column(columns, column, "y")?.to_vec()),
        InputMode::Increments => {
            let x = pick_column(columns, column, "x")?;
            let mut level = 0.0;
            Ok(x.iter()
                .map(|&dx| {
                    level += dx;
                    level
                })
                .collect())
        }
        InputMode::LogVolumes => {
            if columns.data.len() < 2 || !columns.data.len().is_multiple_of(2) {
                return Err(CliError::input(
                    "log-volumes mode expects columns in price,volume pairs",
                ));
            }
            let rows = columns.len();
            let mut y = Vec::with_capacity(rows);
            for t in 0..rows {
                let mut total = 0.0;
                for pair in columns.data.chunks(2) {
                    total += pair[0][t] * pair[1][t];
                }
                if total.is_nan() || total <= 0.0 {
                    return Err(CliError::input(format!(
                        "row {}: total traded value {total} is not positive",
                        t + 1
                    )));
                }
                y.push(total.ln());
            }
            Ok(y)
        }
    }
}

/// First differences with the convention that the first increment is
/// zero, so the increment series aligns with the levels.
pub fn difference_levels(y: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(y.len());
    x.push(0.0);
    for t in 1..y.len() {
        x.push(y[t] - y[t - 1]);
    }
    x
}

/// Full pipeline outcome for one level series.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub report: FitReport,
    pub recon_weight: u8,
    pub y: Vec<f64>,
    pub m: Vec<f64>,
    pub eps: Vec<f64>,
    pub grid: Vec<f64>,
    pub empirical_density: Vec<f64>,
    pub fitted_density: Vec<f64>,
}

/// Differencing, moment and ECF estimation, martingale reconstruction
/// with the selected weight's critical value, and the empirical-vs-
/// fitted density table on a shared grid.
pub fn fit_levels(
    y: &[f64],
    weights: &[u8],
    recon_weight: Option<u8>,
    radial_n: usize,
    angular_m: usize,
) -> CliResult<FitOutcome> {
    if y.len() < MIN_LEVEL_LEN {
        return Err(CliError::input(format!(
            "level series too short: need at least {MIN_LEVEL_LEN} values, got {}",
            y.len()
        )));
    }
    let x = difference_levels(y);
    let report = estimate_increments(&x, weights, radial_n, angular_m)?;

    let recon_weight = recon_weight.unwrap_or(weights[0]);
    let chosen = report
        .fits
        .iter()
        .find(|f| f.weight == recon_weight)
        .ok_or_else(|| {
            CliError::input(format!(
                "--recon-weight {recon_weight} is not among the requested weights"
            ))
        })?;
    let (m, eps) = reconstruct_martingale(y, chosen.estimate.c_hat)?;

    let fitted = SplitMaParams::integrated_ma1(
        chosen.estimate.b_c_hat.value(),
        chosen.estimate.sigma2_hat,
    )?;
    let kde = GaussianKde::new(&x);
    let grid = density_grid(&x);
    let empirical_density: Vec<f64> = grid.iter().map(|&v| kde.evaluate(v)).collect();
    let fitted_density: Vec<f64> = grid
        .iter()
        .map(|&v| pdf_x(&fitted, v))
        .collect::<gsb::Result<_>>()?;

    Ok(FitOutcome {
        report,
        recon_weight,
        y: y.to_vec(),
        m,
        eps,
        grid,
        empirical_density,
        fitted_density,
    })
}

pub fn run_fit(args: &FitArgs) -> CliResult<()> {
    let columns = read_columns(&args.input)?;
    let y = levels_from_input(&columns, args.mode, &args.column)?;
    let weights = default_weights(&args.weights);
    let outcome = fit_levels(&y, &weights, args.recon_weight, args.radial_n, args.angular_m)?;

    print!("{}", table::fit_table(&outcome.report));
    println!("reconstruction uses weight g{}", outcome.recon_weight);

    write_atomic(&with_suffix(&args.out, "_report.csv"), &report_csv(&outcome.report))?;
    let recon = csv_io::render_csv(
        &["t", "y", "m", "eps"],
        (0..outcome.y.len()).map(|t| {
            vec![
                (t + 1).to_string(),
                fmt_f64(outcome.y[t]),
                fmt_f64(outcome.m[t]),
                fmt_f64(outcome.eps[t]),
            ]
        }),
    );
    write_atomic(&with_suffix(&args.out, "_recon.csv"), &recon)?;
    let density = csv_io::render_csv(
        &["x", "empirical", "fitted"],
        (0..outcome.grid.len()).map(|i| {
            vec![
                fmt_f64(outcome.grid[i]),
                fmt_f64(outcome.empirical_density[i]),
                fmt_f64(outcome.fitted_density[i]),
            ]
        }),
    );
    write_atomic(&with_suffix(&args.out, "_density.csv"), &density)?;
    Ok(())
}

// ---------------------------------------------------------------- reconstruct

pub fn run_reconstruct(args: &ReconstructArgs) -> CliResult<()> {
    let columns = read_columns(&args.input)?;
    let y = pick_column(&columns, &args.column, "y")?;
    let (m, eps) = reconstruct_martingale(y, args.c_hat)?;
    let body = csv_io::render_csv(
        &["t", "y", "m", "eps"],
        (0..y.len()).map(|t| {
            vec![
                (t + 1).to_string(),
                fmt_f64(y[t]),
                fmt_f64(m[t]),
                fmt_f64(eps[t]),
            ]
        }),
    );
    write_atomic(&args.out, &body)
}

// ---------------------------------------------------------------- cubature

pub fn cubature_csv(rule: &CubatureRule) -> String {
    csv_io::render_csv(
        &["u1", "u2", "weight"],
        rule.points()
            .iter()
            .zip(rule.weights())
            .map(|(&(u1, u2), &w)| vec![fmt_f64(u1), fmt_f64(u2), fmt_f64(w)]),
    )
}

pub fn run_cubature_dump(args: &CubatureDumpArgs) -> CliResult<()> {
    let rule = build_cubature(gamma_for_weight(args.weight)?, args.radial_n, args.angular_m)?;
    let body = cubature_csv(&rule);
    match &args.out {
        Some(path) => write_atomic(path, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
