//! Analysis configuration: command-line flags merged over an optional flat
//! `key = value` file, flags winning.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use robust_bvs_core::{Hyperparameters, RhoRule};
use serde::Serialize;

use crate::errors::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchKind {
    Enumerate,
    Mc3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Fully resolved analysis settings.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisConfig {
    pub data_path: PathBuf,
    /// Response column name, or a 0-based index when no header matches.
    pub response: Option<String>,
    pub fixed_columns: Vec<String>,
    /// Synthesize an all-ones fixed column when `fixed_columns` is empty.
    pub intercept: bool,
    /// Empty means every non-fixed, non-response column.
    pub candidate_columns: Vec<String>,
    pub preset: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub rho_rule: Option<String>,
    pub sigma_known: Option<f64>,
    pub max_enumeration_dim: Option<usize>,
    pub search: SearchKind,
    pub mc3_iterations: u64,
    pub mc3_chains: u32,
    pub mc3_seed: u64,
    pub quadrature_rel_tol: f64,
    pub output_format: OutputFormat,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl AnalysisConfig {
    /// Build the hyperparameters this configuration asks for.
    pub fn hyperparameters(&self) -> CliResult<Hyperparameters> {
        let mut hp = match self.preset.as_str() {
            "recommended" => Hyperparameters::recommended(),
            "hyper-g" => Hyperparameters::hyper_g(),
            "hyper-g-over-n" => Hyperparameters::hyper_g_over_n(),
            "cui-george" => Hyperparameters::cui_george(),
            "berger-original" => Hyperparameters::berger_original(),
            other => {
                return Err(CliError::Config(format!(
                    "unknown preset '{other}' (expected recommended, hyper-g, hyper-g-over-n, cui-george or berger-original)"
                )))
            }
        };
        if let Some(a) = self.a {
            hp.a = a;
        }
        if let Some(b) = self.b {
            hp.b = b;
        }
        if let Some(rule) = &self.rho_rule {
            hp.rho_rule = parse_rho_rule(rule)?;
        }
        hp.sigma_known = self.sigma_known;
        hp.validate().map_err(CliError::from)?;
        Ok(hp)
    }
}

pub fn parse_rho_rule(text: &str) -> CliResult<RhoRule> {
    if let Some(v) = text.strip_prefix("constant:") {
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::Config(format!("bad constant rho value '{v}'")))?;
        return Ok(RhoRule::Constant(v));
    }
    match text {
        "recommended" => Ok(RhoRule::Recommended),
        "hyper-g" => Ok(RhoRule::HyperG),
        "hyper-g-over-n" => Ok(RhoRule::HyperGOverN),
        "cui-george" => Ok(RhoRule::CuiGeorge),
        "berger-original" => Ok(RhoRule::BergerOriginal),
        other => Err(CliError::Config(format!(
            "unknown rho rule '{other}' (expected recommended, constant:<v>, hyper-g, hyper-g-over-n, cui-george or berger-original)"
        ))),
    }
}

/// Parse a flat `key = value` file. Blank lines and `#` comments are ignored.
pub fn read_config_file(path: &Path) -> CliResult<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "{}:{}: expected 'key = value', got '{raw}'",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

pub fn parse_list(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}
