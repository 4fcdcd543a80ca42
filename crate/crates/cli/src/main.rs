//! Bayesian variable selection for normal linear models, from the command
//! line. `analyze` scores a model space against CSV data and emits a
//! machine-readable report; `validate` re-certifies the numerical claims the
//! library is built on.

mod analyze;
mod config;
mod errors;
mod input;
mod report;
mod validate;

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{parse_list, read_config_file, AnalysisConfig, OutputFormat, SearchKind};
use errors::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "robust-bvs",
    version,
    about = "Bayesian variable selection with robust mixture-of-g priors",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score candidate models against a CSV dataset and report the posterior.
    Analyze(AnalyzeArgs),
    /// Run the numerical property suite and exit nonzero on any failure.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV input with a header row.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Response column (name, or 0-based index); defaults to the first column.
    #[arg(long)]
    response: Option<String>,
    /// Comma-separated columns always kept in the model.
    #[arg(long)]
    fixed: Option<String>,
    /// Do not synthesize an intercept when --fixed is empty.
    #[arg(long)]
    no_intercept: bool,
    /// Comma-separated candidate columns (default: all remaining).
    #[arg(long)]
    candidates: Option<String>,
    /// Hyperparameter preset: recommended, hyper-g, hyper-g-over-n,
    /// cui-george or berger-original.
    #[arg(long)]
    preset: Option<String>,
    /// Override the mixing-density parameter a.
    #[arg(long)]
    a: Option<f64>,
    /// Override the mixing-density parameter b.
    #[arg(long)]
    b: Option<f64>,
    /// Override the rho rule: recommended, constant:<v>, hyper-g,
    /// hyper-g-over-n, cui-george or berger-original.
    #[arg(long)]
    rho: Option<String>,
    /// Treat the error standard deviation as known.
    #[arg(long)]
    sigma_known: Option<f64>,
    /// Only enumerate models with at most this many covariates.
    #[arg(long)]
    max_dim: Option<usize>,
    /// Model-space scan: enumerate or mc3.
    #[arg(long)]
    search: Option<String>,
    #[arg(long)]
    mc3_iterations: Option<u64>,
    #[arg(long)]
    mc3_chains: Option<u32>,
    #[arg(long)]
    mc3_seed: Option<u64>,
    /// Relative tolerance for quadrature-backed evidence evaluation.
    #[arg(long)]
    quad_rel_tol: Option<f64>,
    /// Report format: json or csv.
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key = value configuration file; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// fast: grid agreements, matching identities, limits (< 1 min).
    /// full: adds consistency simulations and brute-force oracles.
    #[arg(long, default_value = "fast")]
    tier: String,
    /// Where the full tier writes the consistency table.
    #[arg(long, default_value = "robust-bvs-consistency.tsv")]
    consistency_out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => run_analyze_command(args),
        Command::Validate(args) => validate::run_validate_command(&args.tier, &args.consistency_out),
    };
    if let Err(e) = outcome {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}

fn merge<T, F: FnOnce(&str) -> CliResult<T>>(
    flag: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
    parse: F,
) -> CliResult<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        Some(raw) => parse(raw).map(Some),
        None => Ok(None),
    }
}

fn bad_key(key: &str, raw: &str) -> CliError {
    CliError::Config(format!("bad value '{raw}' for config key '{key}'"))
}

fn resolve_config(args: AnalyzeArgs) -> CliResult<AnalysisConfig> {
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => HashMap::new(),
    };

    let data_path = merge(args.data, &file, "data", |v| Ok(PathBuf::from(v)))?
        .ok_or_else(|| CliError::Config("no input: pass --data or put 'data = ...' in the config file".into()))?;
    let response = merge(args.response, &file, "response", |v| Ok(v.to_string()))?;
    let fixed_columns =
        merge(args.fixed, &file, "fixed", |v| Ok(v.to_string()))?.map(|v| parse_list(&v)).unwrap_or_default();
    let candidate_columns = merge(args.candidates, &file, "candidates", |v| Ok(v.to_string()))?
        .map(|v| parse_list(&v))
        .unwrap_or_default();
    let intercept = if args.no_intercept {
        false
    } else {
        match file.get("intercept") {
            Some(raw) => raw.parse::<bool>().map_err(|_| bad_key("intercept", raw))?,
            None => true,
        }
    };
    let preset = merge(args.preset, &file, "preset", |v| Ok(v.to_string()))?
        .unwrap_or_else(|| "recommended".to_string());
    let a = merge(args.a, &file, "a", |v| v.parse().map_err(|_| bad_key("a", v)))?;
    let b = merge(args.b, &file, "b", |v| v.parse().map_err(|_| bad_key("b", v)))?;
    let rho_rule = merge(args.rho, &file, "rho", |v| Ok(v.to_string()))?;
    let sigma_known =
        merge(args.sigma_known, &file, "sigma_known", |v| v.parse().map_err(|_| bad_key("sigma_known", v)))?;
    let max_enumeration_dim =
        merge(args.max_dim, &file, "max_dim", |v| v.parse().map_err(|_| bad_key("max_dim", v)))?;
    let search = match merge(args.search, &file, "search", |v| Ok(v.to_string()))?.as_deref() {
        None | Some("enumerate") => SearchKind::Enumerate,
        Some("mc3") => SearchKind::Mc3,
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown search '{other}' (expected enumerate or mc3)"
            )))
        }
    };
    let mc3_iterations = merge(args.mc3_iterations, &file, "mc3_iterations", |v| {
        v.parse().map_err(|_| bad_key("mc3_iterations", v))
    })?
    .unwrap_or(50_000);
    let mc3_chains =
        merge(args.mc3_chains, &file, "mc3_chains", |v| v.parse().map_err(|_| bad_key("mc3_chains", v)))?
            .unwrap_or(1);
    let mc3_seed =
        merge(args.mc3_seed, &file, "mc3_seed", |v| v.parse().map_err(|_| bad_key("mc3_seed", v)))?
            .unwrap_or(20_120_601);
    let quadrature_rel_tol = merge(args.quad_rel_tol, &file, "quad_rel_tol", |v| {
        v.parse().map_err(|_| bad_key("quad_rel_tol", v))
    })?
    .unwrap_or(1e-10);
    let output_format = match merge(args.format, &file, "format", |v| Ok(v.to_string()))?.as_deref() {
        None | Some("json") => OutputFormat::Json,
        Some("csv") => OutputFormat::Csv,
        Some(other) => {
            return Err(CliError::Config(format!("unknown format '{other}' (expected json or csv)")))
        }
    };
    let out = merge(args.out, &file, "out", |v| Ok(PathBuf::from(v)))?;

    Ok(AnalysisConfig {
        data_path,
        response,
        fixed_columns,
        intercept,
        candidate_columns,
        preset,
        a,
        b,
        rho_rule,
        sigma_known,
        max_enumeration_dim,
        search,
        mc3_iterations,
        mc3_chains,
        mc3_seed,
        quadrature_rel_tol,
        output_format,
        out,
    })
}

fn run_analyze_command(args: AnalyzeArgs) -> CliResult<()> {
    let cfg = resolve_config(args)?;
    let report = analyze::run_analyze(&cfg)?;
    let rendered = match cfg.output_format {
        OutputFormat::Json => report::render_json(&report),
        OutputFormat::Csv => report::render_csv(&report),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => {
            std::io::stdout().write_all(rendered.as_bytes())?;
        }
    }
    eprintln!(
        "analyzed {} models over {} candidates (n = {}); coverage {:.6}",
        report.search.models_evaluated,
        report.data.p,
        report.data.n,
        report.evaluated_fraction
    );
    Ok(())
}
