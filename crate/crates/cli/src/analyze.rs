//! The `analyze` subcommand: load data, score the model space, emit the
//! report.

use robust_bvs_core::posterior_inference::{mc3_multi_chain, score_enumeration};
use robust_bvs_core::EvalOptions;

use crate::config::{AnalysisConfig, SearchKind};
use crate::errors::CliResult;
use crate::input::load_csv;
use crate::report::{build_report, Report};

/// Worker-count override, read from `ROBUST_BVS_THREADS`.
pub fn thread_override() -> Option<usize> {
    std::env::var("ROBUST_BVS_THREADS").ok().and_then(|v| v.parse().ok()).filter(|&t| t > 0)
}

pub fn run_analyze(cfg: &AnalysisConfig) -> CliResult<Report> {
    let ds = load_csv(&cfg.data_path, cfg)?;
    let hp = cfg.hyperparameters()?;
    let opts = EvalOptions { quad_rel_tol: cfg.quadrature_rel_tol, threads: thread_override() };

    let report = match cfg.search {
        SearchKind::Enumerate => {
            let score = score_enumeration(&ds, &hp, cfg.max_enumeration_dim, &opts)?;
            build_report(cfg, &ds, &score.models, &score.summary, None)
        }
        SearchKind::Mc3 => {
            let result =
                mc3_multi_chain(&ds, &hp, cfg.mc3_iterations, cfg.mc3_chains, cfg.mc3_seed, &opts)?;
            build_report(cfg, &ds, &result.models, &result.summary, Some(&result))
        }
    };
    Ok(report)
}
