//! From per-model evidence to posterior quantities: normalized model
//! probabilities, covariate inclusion probabilities, the highest-posterior
//! and median-probability models, and a stochastic search for model spaces
//! too large to enumerate.

use std::collections::HashMap;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::design_linalg::{fit_sse, q_ratio};
use crate::error::{Error, Result};
use crate::model_space::{
    enumerate_models, scott_berger_prior_odds, scott_berger_total_log_mass, Dataset,
    Hyperparameters, ModelId,
};
use crate::robust_bf::{
    log_bf_general_with_tol, log_bf_recommended_with_tol, log_bf_sigma_known_with_tol, resolve_rho,
    BfRoute, DEFAULT_QUAD_REL_TOL,
};
use crate::special_functions::log_sum_exp;

/// Hard cap on materialized enumerations.
const ENUMERATION_CAP: u64 = 1 << 22;

/// Evidence and prior odds for one model, ready for normalization.
#[derive(Debug, Clone, Copy)]
pub struct ModelWeight {
    pub model: ModelId,
    pub log_bf: f64,
    pub log_prior_odds: f64,
}

/// A fully scored model as produced by enumeration or search.
#[derive(Debug, Clone)]
pub struct ScoredModel {
    pub model: ModelId,
    pub k_i: usize,
    pub sse: f64,
    pub q_i0: f64,
    pub log_bf: f64,
    pub log_prior_odds: f64,
    pub route: BfRoute,
}

impl ScoredModel {
    pub fn weight(&self) -> ModelWeight {
        ModelWeight { model: self.model, log_bf: self.log_bf, log_prior_odds: self.log_prior_odds }
    }
}

/// Posterior summary over an evaluated collection of models.
#[derive(Debug, Clone)]
pub struct PosteriorSummary {
    /// `(model, probability)` sorted by probability descending, mask
    /// ascending on ties.
    pub model_probs: Vec<(ModelId, f64)>,
    /// Marginal posterior inclusion probability per candidate covariate.
    pub inclusion_probs: Vec<f64>,
    /// Highest-posterior model (smallest mask on ties).
    pub hpm: ModelId,
    /// Median-probability model: covariates with inclusion strictly above 1/2.
    pub mpm: ModelId,
    /// ln of the normalizing constant `sum_j B_j0 P_j0`.
    pub normalizing_log_const: f64,
    /// Prior mass of the evaluated model set (1 for a full enumeration).
    pub evaluated_fraction: f64,
}

/// Normalize evidence into posterior model probabilities:
/// `Pr(M_j | y) = B_j0 P_j0 / sum_l B_l0 P_l0`, computed max-shifted.
///
/// The null model must be present with weight exactly `(0, 0)`; a tagged
/// infinite log Bayes factor concentrates all mass on the models carrying it.
pub fn posterior_model_probs(
    weights: &[ModelWeight],
    p: usize,
    evaluated_fraction: f64,
) -> Result<PosteriorSummary> {
    let null = weights
        .iter()
        .find(|w| w.model.is_null())
        .ok_or_else(|| Error::Contract("the null model entry is required".into()))?;
    if null.log_bf != 0.0 || null.log_prior_odds != 0.0 {
        return Err(Error::Contract(format!(
            "the null entry must carry (log_bf, log_prior_odds) = (0, 0), got ({}, {})",
            null.log_bf, null.log_prior_odds
        )));
    }

    let lw: Vec<f64> = weights.iter().map(|w| w.log_bf + w.log_prior_odds).collect();
    let log_const = log_sum_exp(&lw);

    let mut probs: Vec<f64>;
    if log_const == f64::INFINITY {
        // Saturated models with genuinely infinite evidence share the mass.
        let count = lw.iter().filter(|v| **v == f64::INFINITY).count() as f64;
        probs = lw.iter().map(|v| if *v == f64::INFINITY { 1.0 / count } else { 0.0 }).collect();
    } else {
        probs = lw.iter().map(|v| (v - log_const).exp()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|q| *q /= total);
    }

    // HPM from the unnormalized weights, smallest mask breaking ties.
    let hpm = weights
        .iter()
        .zip(&lw)
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.model.cmp(&a.0.model)))
        .map(|(w, _)| w.model)
        .expect("nonempty weights");

    let mut model_probs: Vec<(ModelId, f64)> =
        weights.iter().zip(&probs).map(|(w, &q)| (w.model, q)).collect();
    model_probs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let inclusion_probs = inclusion_probabilities(&model_probs, p);
    let mpm = median_probability_model(&inclusion_probs);

    Ok(PosteriorSummary {
        model_probs,
        inclusion_probs,
        hpm,
        mpm,
        normalizing_log_const: log_const,
        evaluated_fraction,
    })
}

/// Per-covariate marginal inclusion probability under the given model
/// probabilities.
pub fn inclusion_probabilities(model_probs: &[(ModelId, f64)], p: usize) -> Vec<f64> {
    let mut incl = vec![0.0; p];
    for &(m, prob) in model_probs {
        for (j, slot) in incl.iter_mut().enumerate() {
            if m.contains(j) {
                *slot += prob;
            }
        }
    }
    for v in &mut incl {
        *v = v.clamp(0.0, 1.0);
    }
    incl
}

/// The model containing exactly the covariates with inclusion probability
/// strictly above 1/2 (a tie at exactly 1/2 excludes the covariate).
pub fn median_probability_model(inclusion: &[f64]) -> ModelId {
    let mut mask = 0u64;
    for (j, &pr) in inclusion.iter().enumerate() {
        if pr > 0.5 {
            mask |= 1 << j;
        }
    }
    ModelId::from_mask(mask, inclusion.len()).expect("inclusion length bounds the mask")
}

/// Options controlling evidence evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub quad_rel_tol: f64,
    /// Worker threads for enumeration scoring; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { quad_rel_tol: DEFAULT_QUAD_REL_TOL, threads: None }
    }
}

/// Score a single model: least-squares fit, SSE ratio, log Bayes factor
/// (dispatching on the hyperparameter configuration) and prior odds.
pub fn score_model(
    ds: &Dataset,
    hp: &Hyperparameters,
    sse0: f64,
    m: ModelId,
    opts: &EvalOptions,
) -> Result<ScoredModel> {
    let p = ds.p();
    let log_prior_odds = scott_berger_prior_odds(m, p);
    if m.is_null() {
        return Ok(ScoredModel {
            model: m,
            k_i: 0,
            sse: sse0,
            q_i0: 1.0,
            log_bf: 0.0,
            log_prior_odds,
            route: BfRoute::ClosedForm,
        });
    }
    let (n, k0, ki) = (ds.n(), ds.k0(), m.dimension());
    let sse = fit_sse(ds, m)?;
    let q = q_ratio(sse, sse0)?;
    let params = resolve_rho(hp, n, k0, ki)?;
    let (log_bf, route) = if let Some(sigma) = hp.sigma_known {
        let v = log_bf_sigma_known_with_tol(&params, n, k0, ki, sse0, sse, sigma, opts.quad_rel_tol)?;
        (v, BfRoute::Quadrature)
    } else if hp == &Hyperparameters::recommended() && k0 >= 1 {
        let bf = log_bf_recommended_with_tol(n, k0, ki, q, opts.quad_rel_tol)?;
        (bf.log_bf, bf.route)
    } else {
        let v = log_bf_general_with_tol(&params, n, k0, ki, q, opts.quad_rel_tol)?;
        (v, BfRoute::Quadrature)
    };
    Ok(ScoredModel { model: m, k_i: ki, sse, q_i0: q, log_bf, log_prior_odds, route })
}

/// Result of scoring an enumerated model set.
#[derive(Debug, Clone)]
pub struct EnumerationScore {
    /// All scored models in ascending mask order.
    pub models: Vec<ScoredModel>,
    pub summary: PosteriorSummary,
}

/// Score every model with dimension at most `max_dim` (all `2^p` when absent)
/// and normalize. Scoring is data-parallel over models; the output order and
/// values do not depend on the worker count.
pub fn score_enumeration(
    ds: &Dataset,
    hp: &Hyperparameters,
    max_dim: Option<usize>,
    opts: &EvalOptions,
) -> Result<EnumerationScore> {
    let p = ds.p();
    let masks: Vec<ModelId> = {
        let mut v = Vec::new();
        for m in enumerate_models(p, max_dim)? {
            v.push(m);
            if v.len() as u64 > ENUMERATION_CAP {
                return Err(Error::Config(format!(
                    "enumeration exceeds {ENUMERATION_CAP} models; restrict max_dim or use mc3"
                )));
            }
        }
        v
    };
    let sse0 = fit_sse(ds, ModelId::NULL)?;

    let run = || -> Result<Vec<ScoredModel>> {
        masks.par_iter().map(|&m| score_model(ds, hp, sse0, m, opts)).collect()
    };
    let models = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?
            .install(run),
        None => run(),
    }?;

    let covers_everything = max_dim.map_or(true, |d| d >= p);
    let evaluated_fraction = if covers_everything {
        1.0
    } else {
        let odds: Vec<f64> = models.iter().map(|s| s.log_prior_odds).collect();
        (log_sum_exp(&odds) - scott_berger_total_log_mass(p)).exp()
    };
    let weights: Vec<ModelWeight> = models.iter().map(|s| s.weight()).collect();
    let summary = posterior_model_probs(&weights, p, evaluated_fraction)?;
    Ok(EnumerationScore { models, summary })
}

/// Outcome of a stochastic model-space search.
#[derive(Debug, Clone)]
pub struct Mc3Result {
    /// Exact-weight posterior renormalized over the visited set.
    pub summary: PosteriorSummary,
    /// Scored models for every visited mask, ascending mask order.
    pub models: Vec<ScoredModel>,
    /// `(model, visits)` tallies in ascending mask order.
    pub visit_tallies: Vec<(ModelId, u64)>,
    pub accepted: u64,
    pub proposals: u64,
    /// Proposals skipped because the proposed design was rank deficient.
    pub skipped_rank_failures: u64,
}

/// Metropolis search over the model lattice with single-bit-flip proposals.
///
/// Each iteration records the current model, then proposes flipping one
/// uniformly chosen covariate and accepts with probability
/// `min(1, exp(delta log BF + delta log prior odds))`. Evidence is exact and
/// memoized per mask, so the renormalized probabilities over the visited set
/// are the exact conditional posterior on that set. Runs are reproducible
/// for a fixed seed.
pub fn mc3_search(
    ds: &Dataset,
    hp: &Hyperparameters,
    iterations: u64,
    seed: u64,
) -> Result<Mc3Result> {
    mc3_search_with_opts(ds, hp, iterations, seed, &EvalOptions::default())
}

pub fn mc3_search_with_opts(
    ds: &Dataset,
    hp: &Hyperparameters,
    iterations: u64,
    seed: u64,
    opts: &EvalOptions,
) -> Result<Mc3Result> {
    if iterations == 0 {
        return Err(Error::Config("mc3 needs at least one iteration".into()));
    }
    let p = ds.p();
    if p == 0 {
        return Err(Error::Config("mc3 needs at least one candidate covariate".into()));
    }
    let sse0 = fit_sse(ds, ModelId::NULL)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let mut cache: HashMap<u64, ScoredModel> = HashMap::new();
    let mut tallies: HashMap<u64, u64> = HashMap::new();
    let mut accepted = 0u64;
    let mut proposals = 0u64;
    let mut skipped = 0u64;

    let mut current = ModelId::NULL;
    cache.insert(current.mask(), score_model(ds, hp, sse0, current, opts)?);

    for _ in 0..iterations {
        *tallies.entry(current.mask()).or_insert(0) += 1;
        let j = rng.random_range(0..p);
        let proposal = current.flip(j);
        proposals += 1;
        if !cache.contains_key(&proposal.mask()) {
            match score_model(ds, hp, sse0, proposal, opts) {
                Ok(s) => {
                    cache.insert(proposal.mask(), s);
                }
                Err(Error::SingularDesign { .. }) | Err(Error::InsufficientData { .. }) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            }
        }
        let cur_w = {
            let s = &cache[&current.mask()];
            s.log_bf + s.log_prior_odds
        };
        let prop_w = {
            let s = &cache[&proposal.mask()];
            s.log_bf + s.log_prior_odds
        };
        let accept = prop_w - cur_w >= 0.0 || rng.random::<f64>().ln() < prop_w - cur_w;
        if accept {
            current = proposal;
            accepted += 1;
        }
    }

    let mut visited: Vec<u64> = tallies.keys().copied().collect();
    visited.sort_unstable();
    let models: Vec<ScoredModel> = visited.iter().map(|m| cache[m].clone()).collect();
    let visit_tallies: Vec<(ModelId, u64)> =
        visited.iter().map(|m| (ModelId::from_mask(*m, p).expect("visited mask"), tallies[m])).collect();

    let odds: Vec<f64> = models.iter().map(|s| s.log_prior_odds).collect();
    let evaluated_fraction = (log_sum_exp(&odds) - scott_berger_total_log_mass(p)).exp();
    let weights: Vec<ModelWeight> = models.iter().map(|s| s.weight()).collect();
    let summary = posterior_model_probs(&weights, p, evaluated_fraction)?;

    Ok(Mc3Result { summary, models, visit_tallies, accepted, proposals, skipped_rank_failures: skipped })
}

/// Run several independent chains (seeds `seed`, `seed + 1`, ...) and merge
/// them by tally addition over the union of visited models.
pub fn mc3_multi_chain(
    ds: &Dataset,
    hp: &Hyperparameters,
    iterations: u64,
    chains: u32,
    seed: u64,
    opts: &EvalOptions,
) -> Result<Mc3Result> {
    if chains == 0 {
        return Err(Error::Config("at least one chain is required".into()));
    }
    let runs: Vec<Mc3Result> = (0..chains)
        .map(|c| mc3_search_with_opts(ds, hp, iterations, seed.wrapping_add(c as u64), opts))
        .collect::<Result<_>>()?;

    let mut merged_models: HashMap<u64, ScoredModel> = HashMap::new();
    let mut merged_tallies: HashMap<u64, u64> = HashMap::new();
    let mut accepted = 0;
    let mut proposals = 0;
    let mut skipped = 0;
    for run in &runs {
        accepted += run.accepted;
        proposals += run.proposals;
        skipped += run.skipped_rank_failures;
        for s in &run.models {
            merged_models.entry(s.model.mask()).or_insert_with(|| s.clone());
        }
        for (m, t) in &run.visit_tallies {
            *merged_tallies.entry(m.mask()).or_insert(0) += t;
        }
    }
    let p = ds.p();
    let mut visited: Vec<u64> = merged_tallies.keys().copied().collect();
    visited.sort_unstable();
    let models: Vec<ScoredModel> = visited.iter().map(|m| merged_models[m].clone()).collect();
    let visit_tallies: Vec<(ModelId, u64)> = visited
        .iter()
        .map(|m| (ModelId::from_mask(*m, p).expect("visited mask"), merged_tallies[m]))
        .collect();
    let odds: Vec<f64> = models.iter().map(|s| s.log_prior_odds).collect();
    let evaluated_fraction = (log_sum_exp(&odds) - scott_berger_total_log_mass(p)).exp();
    let weights: Vec<ModelWeight> = models.iter().map(|s| s.weight()).collect();
    let summary = posterior_model_probs(&weights, p, evaluated_fraction)?;
    Ok(Mc3Result { summary, models, visit_tallies, accepted, proposals, skipped_rank_failures: skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn w(mask: u64, p: usize, log_bf: f64, log_odds: f64) -> ModelWeight {
        ModelWeight { model: ModelId::from_mask(mask, p).unwrap(), log_bf, log_prior_odds: log_odds }
    }

    #[test]
    fn two_symmetric_models_split_mass() {
        let s = posterior_model_probs(&[w(0, 1, 0.0, 0.0), w(1, 1, 0.0, 0.0)], 1, 1.0).unwrap();
        assert!((s.model_probs[0].1 - 0.5).abs() < 1e-15);
        assert!((s.model_probs[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bayes_rule_arithmetic() {
        // Raw BFs (1, 2, 2) with uniform odds give (0.2, 0.4, 0.4).
        let s = posterior_model_probs(
            &[w(0, 2, 0.0, 0.0), w(1, 2, 2f64.ln(), 0.0), w(2, 2, 2f64.ln(), 0.0)],
            2,
            1.0,
        )
        .unwrap();
        let by_mask: HashMap<u64, f64> = s.model_probs.iter().map(|(m, q)| (m.mask(), *q)).collect();
        assert!((by_mask[&0] - 0.2).abs() < 1e-12);
        assert!((by_mask[&1] - 0.4).abs() < 1e-12);
        assert!((by_mask[&2] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn missing_null_is_a_contract_error() {
        let r = posterior_model_probs(&[w(1, 1, 0.0, 0.0)], 1, 1.0);
        assert!(matches!(r, Err(Error::Contract(_))));
    }

    #[test]
    fn probabilities_sum_to_one() {
        let ws: Vec<ModelWeight> =
            (0..16).map(|m| w(m, 4, (m as f64) * 0.37 - 1.0, -(m as f64) * 0.11)).collect();
        let mut ws = ws;
        ws[0] = w(0, 4, 0.0, 0.0);
        let s = posterior_model_probs(&ws, 4, 1.0).unwrap();
        let total: f64 = s.model_probs.iter().map(|(_, q)| q).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_invariance_of_probabilities() {
        // Adding c to every log BF while subtracting it from every log odds
        // leaves the posterior untouched.
        let base: Vec<ModelWeight> =
            vec![w(0, 2, 0.0, 0.0), w(1, 2, 0.8, -0.3), w(2, 2, -0.2, 0.5), w(3, 2, 1.1, -1.0)];
        let c = 7.7;
        let shifted: Vec<ModelWeight> = base
            .iter()
            .map(|x| ModelWeight {
                model: x.model,
                log_bf: x.log_bf + c,
                log_prior_odds: x.log_prior_odds - c,
            })
            .collect();
        let mut shifted = shifted;
        shifted[0] = base[0]; // keep the null at (0, 0) per the contract
        let s1 = posterior_model_probs(&base, 2, 1.0).unwrap();
        let s2 = posterior_model_probs(&shifted, 2, 1.0).unwrap();
        // All non-null relative masses shift by the same factor on both
        // sides of the ratio, so only the null's share moves; compare the
        // non-null models against each other instead.
        let q1: HashMap<u64, f64> = s1.model_probs.iter().map(|(m, q)| (m.mask(), *q)).collect();
        let q2: HashMap<u64, f64> = s2.model_probs.iter().map(|(m, q)| (m.mask(), *q)).collect();
        assert!(((q1[&1] / q1[&3]) - (q2[&1] / q2[&3])).abs() < 1e-12);
        assert!(((q1[&2] / q1[&3]) - (q2[&2] / q2[&3])).abs() < 1e-12);
    }

    #[test]
    fn inclusion_edge_cases() {
        let all_null = posterior_model_probs(&[w(0, 2, 0.0, 0.0)], 2, 1.0).unwrap();
        assert_eq!(all_null.inclusion_probs, vec![0.0, 0.0]);

        // All mass on the full model.
        let s = posterior_model_probs(&[w(0, 2, 0.0, 0.0), w(3, 2, 500.0, 0.0)], 2, 1.0).unwrap();
        assert!(s.inclusion_probs.iter().all(|&v| v > 1.0 - 1e-12));

        // Uniform over 2^2 models: inclusion (1/2, 1/2).
        let s = posterior_model_probs(
            &[w(0, 2, 0.0, 0.0), w(1, 2, 0.0, 0.0), w(2, 2, 0.0, 0.0), w(3, 2, 0.0, 0.0)],
            2,
            1.0,
        )
        .unwrap();
        assert!(s.inclusion_probs.iter().all(|&v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn median_model_tie_rule() {
        assert_eq!(median_probability_model(&[0.9, 0.1]).mask(), 0b01);
        assert_eq!(median_probability_model(&[0.5, 0.7]).mask(), 0b10);
        assert_eq!(median_probability_model(&[0.49, 0.2]).mask(), 0);
    }

    #[test]
    fn infinite_evidence_concentrates() {
        let s = posterior_model_probs(
            &[w(0, 2, 0.0, 0.0), w(1, 2, f64::INFINITY, 0.0), w(3, 2, f64::INFINITY, -0.5)],
            2,
            1.0,
        )
        .unwrap();
        let by_mask: HashMap<u64, f64> = s.model_probs.iter().map(|(m, q)| (m.mask(), *q)).collect();
        assert_eq!(by_mask[&0], 0.0);
        assert_eq!(by_mask[&1], 0.5);
        assert_eq!(by_mask[&3], 0.5);
        assert_eq!(s.hpm.mask(), 1); // smallest mask among the infinite pair
    }

    fn toy_dataset(n: usize, p: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut normal = || {
            let u1: f64 = rng.random::<f64>().max(1e-12);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let x = DMatrix::from_fn(n, p, |_, _| normal());
        let y = DVector::from_fn(n, |i, _| 1.5 * x[(i, 0)] + 0.5 * normal());
        Dataset::with_intercept(y, x, (0..p).map(|j| format!("x{j}")).collect()).unwrap()
    }

    #[test]
    fn enumeration_identifies_strong_predictor() {
        let ds = toy_dataset(60, 3, 99);
        let hp = Hyperparameters::recommended();
        let score = score_enumeration(&ds, &hp, None, &EvalOptions::default()).unwrap();
        assert_eq!(score.models.len(), 8);
        assert!(score.summary.hpm.contains(0));
        assert!(score.summary.inclusion_probs[0] > 0.95);
        assert!((score.summary.evaluated_fraction - 1.0).abs() < 1e-12);
        let total: f64 = score.summary.model_probs.iter().map(|(_, q)| q).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_results_do_not_depend_on_thread_count() {
        let ds = toy_dataset(40, 4, 7);
        let hp = Hyperparameters::recommended();
        let one = score_enumeration(&ds, &hp, None, &EvalOptions { threads: Some(1), ..Default::default() })
            .unwrap();
        let four = score_enumeration(&ds, &hp, None, &EvalOptions { threads: Some(4), ..Default::default() })
            .unwrap();
        for (a, b) in one.models.iter().zip(&four.models) {
            assert_eq!(a.model, b.model);
            assert_eq!(a.log_bf.to_bits(), b.log_bf.to_bits());
        }
    }

    #[test]
    fn truncated_enumeration_reports_coverage() {
        let ds = toy_dataset(40, 4, 7);
        let hp = Hyperparameters::recommended();
        let s = score_enumeration(&ds, &hp, Some(1), &EvalOptions::default()).unwrap();
        // Dimensions 0 and 1 of 0..=4 hold 2/5 of the prior odds mass.
        assert!((s.summary.evaluated_fraction - 0.4).abs() < 1e-9);
    }

    #[test]
    fn mc3_is_deterministic_for_a_seed() {
        let ds = toy_dataset(50, 5, 17);
        let hp = Hyperparameters::recommended();
        let a = mc3_search(&ds, &hp, 2000, 4242).unwrap();
        let b = mc3_search(&ds, &hp, 2000, 4242).unwrap();
        assert_eq!(a.visit_tallies.len(), b.visit_tallies.len());
        for (x, y) in a.visit_tallies.iter().zip(&b.visit_tallies) {
            assert_eq!(x, y);
        }
        assert_eq!(a.accepted, b.accepted);
    }

    #[test]
    fn mc3_single_iteration_stays_at_null() {
        let ds = toy_dataset(30, 3, 5);
        let hp = Hyperparameters::recommended();
        let r = mc3_search(&ds, &hp, 1, 1).unwrap();
        assert_eq!(r.visit_tallies.len(), 1);
        assert_eq!(r.visit_tallies[0].0, ModelId::NULL);
        assert_eq!(r.summary.model_probs[0].1, 1.0);
    }

    #[test]
    fn mc3_multi_chain_merges_tallies() {
        let ds = toy_dataset(40, 3, 21);
        let hp = Hyperparameters::recommended();
        let merged = mc3_multi_chain(&ds, &hp, 500, 3, 9, &EvalOptions::default()).unwrap();
        let total: u64 = merged.visit_tallies.iter().map(|(_, t)| t).sum();
        assert_eq!(total, 1500);
    }
}
