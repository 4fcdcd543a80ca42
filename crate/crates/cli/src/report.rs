//! The machine-readable analysis report.
//!
//! The JSON schema is versioned; producing it twice from the same inputs
//! yields byte-identical output regardless of worker count. Infinite log
//! Bayes factors (saturated models) serialize as JSON `null`.

use robust_bvs_core::posterior_inference::{Mc3Result, ScoredModel};
use robust_bvs_core::{Dataset, ModelId, PosteriorSummary};
use serde::Serialize;

use crate::config::{AnalysisConfig, SearchKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: AnalysisConfig,
    pub data: DataInfo,
    pub search: SearchInfo,
    pub evaluated_fraction: f64,
    pub normalizing_log_const: f64,
    pub models: Vec<ModelRow>,
    pub inclusion_probabilities: Vec<InclusionRow>,
    pub hpm: ModelRef,
    pub mpm: ModelRef,
    pub plot_data: PlotData,
}

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct DataInfo {
    pub n: usize,
    pub k0: usize,
    pub p: usize,
    pub fixed_columns: Vec<String>,
    pub candidate_columns: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SearchInfo {
    pub kind: SearchKind,
    pub models_evaluated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc3: Option<Mc3Info>,
}

#[derive(Debug, Serialize)]
pub struct Mc3Info {
    pub iterations: u64,
    pub chains: u32,
    pub seed: u64,
    pub accepted: u64,
    pub proposals: u64,
    pub skipped_rank_failures: u64,
}

#[derive(Debug, Serialize)]
pub struct ModelRow {
    pub mask: u64,
    pub columns: Vec<String>,
    pub k: usize,
    pub sse: f64,
    pub q: f64,
    /// `null` when the evidence is a tagged infinity (saturated model).
    pub log_bf: f64,
    pub log_prior_odds: f64,
    pub posterior_prob: f64,
}

#[derive(Debug, Serialize)]
pub struct InclusionRow {
    pub column: String,
    pub probability: f64,
}

#[derive(Debug, Serialize)]
pub struct ModelRef {
    pub mask: u64,
    pub columns: Vec<String>,
}

/// Tab-separated blocks for external plotting: inclusion-probability bars
/// and the top posterior models.
#[derive(Debug, Serialize)]
pub struct PlotData {
    pub inclusion_tsv: String,
    pub top_models_tsv: String,
}

const TOP_MODELS_IN_PLOT: usize = 20;

pub fn build_report(
    cfg: &AnalysisConfig,
    ds: &Dataset,
    scored: &[ScoredModel],
    summary: &PosteriorSummary,
    mc3: Option<&Mc3Result>,
) -> Report {
    let by_mask: std::collections::HashMap<u64, &ScoredModel> =
        scored.iter().map(|s| (s.model.mask(), s)).collect();

    let models: Vec<ModelRow> = summary
        .model_probs
        .iter()
        .map(|(m, prob)| {
            let s = by_mask[&m.mask()];
            ModelRow {
                mask: m.mask(),
                columns: ds.selected_names(*m),
                k: s.k_i,
                sse: s.sse,
                q: s.q_i0,
                log_bf: s.log_bf,
                log_prior_odds: s.log_prior_odds,
                posterior_prob: *prob,
            }
        })
        .collect();

    let inclusion_probabilities: Vec<InclusionRow> = ds
        .candidate_names()
        .iter()
        .zip(&summary.inclusion_probs)
        .map(|(name, prob)| InclusionRow { column: name.clone(), probability: *prob })
        .collect();

    let mut inclusion_tsv = String::from("column\tinclusion_probability\n");
    for row in &inclusion_probabilities {
        inclusion_tsv.push_str(&format!("{}\t{}\n", row.column, row.probability));
    }
    let mut top_models_tsv = String::from("rank\tmask\tcolumns\tposterior_prob\n");
    for (rank, row) in models.iter().take(TOP_MODELS_IN_PLOT).enumerate() {
        top_models_tsv.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            rank + 1,
            row.mask,
            if row.columns.is_empty() { "(null)".to_string() } else { row.columns.join("+") },
            row.posterior_prob
        ));
    }

    let model_ref = |m: ModelId| ModelRef { mask: m.mask(), columns: ds.selected_names(m) };

    Report {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo { name: "robust-bvs", version: env!("CARGO_PKG_VERSION") },
        config: cfg.clone(),
        data: DataInfo {
            n: ds.n(),
            k0: ds.k0(),
            p: ds.p(),
            fixed_columns: ds.fixed_names().to_vec(),
            candidate_columns: ds.candidate_names().to_vec(),
        },
        search: SearchInfo {
            kind: cfg.search,
            models_evaluated: scored.len(),
            mc3: mc3.map(|r| Mc3Info {
                iterations: cfg.mc3_iterations,
                chains: cfg.mc3_chains,
                seed: cfg.mc3_seed,
                accepted: r.accepted,
                proposals: r.proposals,
                skipped_rank_failures: r.skipped_rank_failures,
            }),
        },
        evaluated_fraction: summary.evaluated_fraction,
        normalizing_log_const: summary.normalizing_log_const,
        models,
        inclusion_probabilities,
        hpm: model_ref(summary.hpm),
        mpm: model_ref(summary.mpm),
        plot_data: PlotData { inclusion_tsv, top_models_tsv },
    }
}

pub fn render_json(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

/// The per-model table as CSV (for `--format csv`).
pub fn render_csv(report: &Report) -> String {
    let mut out = String::from("mask,columns,k,sse,q,log_bf,log_prior_odds,posterior_prob\n");
    for row in &report.models {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.mask,
            row.columns.join("+"),
            row.k,
            row.sse,
            row.q,
            row.log_bf,
            row.log_prior_odds,
            row.posterior_prob
        ));
    }
    out
}
