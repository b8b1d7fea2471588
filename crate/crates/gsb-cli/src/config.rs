//! Flat key-value configuration files for the Monte Carlo driver.
//!
//! One `key = value` pair per line, `#` starts a comment. Command-line
//! flags override file values. Example:
//!
//! ```text
//! # Monte Carlo study
//! t = 1500
//! reps = 1000
//! b_c = 0.6827
//! sigma2 = 1.0
//! alphas = 1.0
//! weights = 1,2,3
//! seed = 42
//! parallel = true
//! ```

use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Raw study configuration prior to validation against the model.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub t_len: usize,
    pub reps: usize,
    pub b_c: f64,
    pub sigma2: f64,
    pub alphas: Vec<f64>,
    pub weights: Vec<u8>,
    pub seed: Option<u64>,
    pub parallel: bool,
    pub radial_n: usize,
    pub angular_m: usize,
    pub jb_mc_reps: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            t_len: 1500,
            reps: 1000,
            b_c: 0.6827,
            sigma2: 1.0,
            alphas: vec![1.0],
            weights: vec![1, 2, 3],
            seed: None,
            parallel: false,
            radial_n: 5,
            angular_m: 4,
            jb_mc_reps: 2000,
        }
    }
}

fn bad_value(path: &Path, line: usize, key: &str, value: &str) -> CliError {
    CliError::input(format!(
        "{}: line {line}: invalid value '{value}' for key '{key}'",
        path.display()
    ))
}

impl StudyConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let mut config = StudyConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::input(format!(
                    "{}: line {line}: expected 'key = value', found '{content}'",
                    path.display()
                )));
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "t" | "t_len" => {
                    config.t_len = value.parse().map_err(|_| bad_value(path, line, key, value))?
                }
                "reps" => {
                    config.reps = value.parse().map_err(|_| bad_value(path, line, key, value))?
                }
                "b_c" => {
                    config.b_c = value.parse().map_err(|_| bad_value(path, line, key, value))?
                }
                "sigma2" => {
                    config.sigma2 = value.parse().map_err(|_| bad_value(path, line, key, value))?
                }
                "alphas" => {
                    config.alphas = value
                        .split(',')
                        .map(|a| a.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad_value(path, line, key, value))?
                }
                "weights" => {
                    let weights: Vec<u8> = value
                        .split(',')
                        .map(|w| w.trim().parse::<u8>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad_value(path, line, key, value))?;
                    if weights.iter().any(|w| !(1..=3).contains(w)) {
                        return Err(CliError::input(format!(
                            "{}: line {line}: key 'weights' accepts only 1, 2 or 3, found '{value}'",
                            path.display()
                        )));
                    }
                    config.weights = weights;
                }
                "seed" => {
                    config.seed =
                        Some(value.parse().map_err(|_| bad_value(path, line, key, value))?)
                }
                "parallel" => {
                    config.parallel =
                        value.parse().map_err(|_| bad_value(path, line, key, value))?
                }
                "radial_n" => {
                    config.radial_n =
                        value.parse().map_err(|_| bad_value(path, line, key, value))?
                }
                "angular_m" => {
                    config.angular_m =
                        value.parse().map_err(|_| bad_value(path, line, key, value))?
                }
                "jb_mc_reps" => {
                    config.jb_mc_reps =
                        value.parse().map_err(|_| bad_value(path, line, key, value))?
                }
                other => {
                    return Err(CliError::input(format!(
                        "{}: line {line}: unknown key '{other}'",
                        path.display()
                    )))
                }
            }
        }
        Ok(config)
    }
}
