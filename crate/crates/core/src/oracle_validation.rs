//! Independent ground-truth computations used to adjudicate every closed
//! form in the evidence layer.
//!
//! The oracle chain runs from the bottom up: a brute-force marginal on tiny
//! datasets certifies the fixed-g kernel, the kernel mixed against the
//! mixing density certifies the one-dimensional integral and hypergeometric
//! routes, and a seeded simulator checks the large-sample behavior of the
//! whole pipeline. None of these paths share code with the implementations
//! they check.

use std::io::Write;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model_space::{Dataset, Hyperparameters, ModelId};
use crate::posterior_inference::{score_enumeration, EvalOptions};
use crate::robust_bf::{MixingDensityParams, DEFAULT_QUAD_REL_TOL};
use crate::special_functions::{integrate_log, integrate_log_real_line};

/// Log Bayes factor of a `ki`-dimensional model against the null for a
/// *fixed* mixing value `g`:
///
/// `B(g) = (1+g)^{(n-k0-ki)/2} (1 + g Q)^{-(n-k0)/2}`.
pub fn log_bf_given_g(g: f64, n: usize, k0: usize, ki: usize, q: f64) -> Result<f64> {
    if !(g >= 0.0) || !g.is_finite() {
        return Err(Error::Domain(format!("g must be nonnegative and finite, got {g}")));
    }
    if n < k0 + ki {
        return Err(Error::Domain(format!(
            "the fixed-g kernel needs n >= k0 + ki = {}, got n = {n}",
            k0 + ki
        )));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("Q must lie in [0, 1], got {q}")));
    }
    if q == 0.0 && n > k0 + ki {
        return Err(Error::Domain(
            "q = 0 with n > k0 + ki has unbounded fixed-g evidence".into(),
        ));
    }
    let half_diff = 0.5 * (n - k0 - ki) as f64;
    let half_out = 0.5 * (n - k0) as f64;
    Ok(half_diff * g.ln_1p() - half_out * (g * q).ln_1p())
}

/// THE reference Bayes factor: the fixed-g kernel mixed against the mixing
/// density by log-scale quadrature over `g` on `[g_min, inf)`. Substituting
/// `g = g_min + e^w - 1` keeps the far tail resolvable when the evidence
/// peak sits at very large `g`.
pub fn log_bf_quadrature(
    p: &MixingDensityParams,
    n: usize,
    k0: usize,
    ki: usize,
    q: f64,
) -> Result<f64> {
    log_bf_quadrature_with_tol(p, n, k0, ki, q, DEFAULT_QUAD_REL_TOL)
}

pub fn log_bf_quadrature_with_tol(
    p: &MixingDensityParams,
    n: usize,
    k0: usize,
    ki: usize,
    q: f64,
    rel_tol: f64,
) -> Result<f64> {
    if ki == 0 {
        return Ok(0.0);
    }
    p.validate(n)?;
    if n < k0 + ki {
        return Err(Error::Domain(format!(
            "the mixture needs n >= k0 + ki = {}, got n = {n}",
            k0 + ki
        )));
    }
    if !(0.0..=1.0).contains(&q) || (q == 0.0 && n > k0 + ki) {
        return Err(Error::Domain(format!("Q = {q} outside the integrable range at n = {n}")));
    }
    let g_min = p.g_support_min(n);
    let half_diff = 0.5 * (n - k0 - ki) as f64;
    let half_out = 0.5 * (n - k0) as f64;
    let ln_prefactor = p.a.ln() + p.a * (p.rho * (p.b + n as f64)).ln();
    let ln_f = move |g: f64| {
        if !g.is_finite() {
            return f64::NEG_INFINITY;
        }
        half_diff * g.ln_1p() - half_out * (g * q).ln_1p() + ln_prefactor
            - (p.a + 1.0) * (g + p.b).ln()
    };
    let r = integrate_log(|w| ln_f(g_min + w.exp_m1()) + w, 0.0, f64::INFINITY, rel_tol)?;
    Ok(r.value)
}

/// ln of the q -> 0 envelope of the mixture: the fixed-g kernel is bounded
/// above by `(1+g)^{(n-k0-ki)/2}` uniformly in `q`, so
/// `integral (1+g)^{(n-k0-ki)/2} p(g) dg` bounds the Bayes factor for every
/// `q`. The tail exponent `(n-k0-ki)/2 - (a+1)` makes the envelope finite
/// exactly when `n < k0 + ki + 2a`; outside that range this returns a domain
/// error rather than a divergent integral.
pub fn log_bf_q_zero_envelope(
    p: &MixingDensityParams,
    n: usize,
    k0: usize,
    ki: usize,
) -> Result<f64> {
    p.validate(n)?;
    if n < k0 + ki {
        return Err(Error::Domain(format!(
            "the envelope needs n >= k0 + ki = {}, got n = {n}",
            k0 + ki
        )));
    }
    let half_diff = 0.5 * (n - k0 - ki) as f64;
    if half_diff >= p.a {
        return Err(Error::Domain(format!(
            "the q -> 0 envelope diverges: (n - k0 - ki)/2 = {half_diff} is not below a = {}",
            p.a
        )));
    }
    let g_min = p.g_support_min(n);
    let ln_prefactor = p.a.ln() + p.a * (p.rho * (p.b + n as f64)).ln();
    let ln_f = move |g: f64| {
        if !g.is_finite() {
            return f64::NEG_INFINITY;
        }
        half_diff * g.ln_1p() + ln_prefactor - (p.a + 1.0) * (g + p.b).ln()
    };
    let r = integrate_log(
        |w| ln_f(g_min + w.exp_m1()) + w,
        0.0,
        f64::INFINITY,
        DEFAULT_QUAD_REL_TOL,
    )?;
    Ok(r.value)
}

/// Bayes factor under the limiting (sample-size-free) mixing density on the
/// rescaled variable `g* = g/n`: mixes the fixed-g kernel at `g = n g*`
/// against `a [rho(c+1)]^a (g* + c)^{-(a+1)}` on `g* > rho(c+1) - c`.
pub fn log_bf_intrinsic_mixture(
    a: f64,
    rho: f64,
    c: f64,
    n: usize,
    k0: usize,
    ki: usize,
    q: f64,
) -> Result<f64> {
    if ki == 0 {
        return Ok(0.0);
    }
    if rho * (c + 1.0) <= c {
        return Err(Error::Domain("empty intrinsic support".into()));
    }
    let g_star_min = (rho * (c + 1.0) - c).max(0.0);
    let half_diff = 0.5 * (n - k0 - ki) as f64;
    let half_out = 0.5 * (n - k0) as f64;
    let ln_prefactor = a.ln() + a * (rho * (c + 1.0)).ln();
    let nf = n as f64;
    let ln_f = move |gs: f64| {
        if !gs.is_finite() {
            return f64::NEG_INFINITY;
        }
        let g = nf * gs;
        half_diff * g.ln_1p() - half_out * (g * q).ln_1p() + ln_prefactor
            - (a + 1.0) * (gs + c).ln()
    };
    let r = integrate_log(
        |w| ln_f(g_star_min + w.exp_m1()) + w,
        0.0,
        f64::INFINITY,
        DEFAULT_QUAD_REL_TOL,
    )?;
    Ok(r.value)
}

/// Brute-force log marginal likelihood on a tiny dataset by nested adaptive
/// quadrature over the model parameters, with the coefficient prior held at
/// a fixed mixing value `g`. Intended for `n <= 4`, `k0 = 1`, `ki <= 1`;
/// certifies [`log_bf_given_g`] without sharing any code with it.
pub fn log_marginal_direct(ds: &Dataset, m: ModelId, g: f64) -> Result<f64> {
    let n = ds.n();
    if n > 4 {
        return Err(Error::Domain("direct integration is limited to n <= 4".into()));
    }
    if ds.k0() != 1 {
        return Err(Error::Domain("direct integration expects a single fixed column".into()));
    }
    if m.dimension() > 1 {
        return Err(Error::Domain("direct integration is limited to k_i <= 1".into()));
    }
    if !(g > 0.0) && !m.is_null() {
        return Err(Error::Domain(format!("fixed g must be positive, got {g}")));
    }

    let y = ds.y().clone();
    let x0 = ds.x0().column(0).into_owned();
    let xi = if m.is_null() { None } else { Some(ds.x().column(m.columns()[0]).into_owned()) };
    // Prior scale for the coefficient block: v = the fixed-block-adjusted
    // candidate column; its squared norm is V'V.
    let vtv = xi.as_ref().map(|x| {
        let proj = x0.dot(x) / x0.dot(&x0);
        let v = x - &x0 * proj;
        v.dot(&v)
    });

    let nf = n as f64;
    let ln_two_pi = (2.0 * std::f64::consts::PI).ln();

    let ln_lik = |b0: f64, bi: f64, sigma: f64| -> f64 {
        let mut ss = 0.0;
        for r in 0..n {
            let mut mu = b0 * x0[r];
            if let Some(x) = &xi {
                mu += bi * x[r];
            }
            let d = y[r] - mu;
            ss += d * d;
        }
        -0.5 * nf * (ln_two_pi + 2.0 * sigma.ln()) - ss / (2.0 * sigma * sigma)
    };

    let inner_tol = 1e-9;
    let mid_tol = 5e-9;
    let outer_tol = 1e-7;
    let failure: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
    let record = |e: Error| -> f64 {
        failure.borrow_mut().get_or_insert(e);
        f64::NEG_INFINITY
    };

    // sigma = e^w; the 1/sigma prior contributes -w and the Jacobian +w,
    // which cancel. The window is set from the least-squares SSE: below
    // sigma^2 = SSE_min/1400 every likelihood value is under e^{-700}
    // relative to the peak, and past the right edge the sigma-marginal tail
    // sigma^{-(n-k0)} has shed e^{-45} of its mass. Cutting the left side
    // before log-likelihood magnitudes explode also keeps the integrand's
    // floating-point jitter far below the quadrature tolerances.
    let sse_min = crate::design_linalg::fit_sse(ds, m)?;
    if sse_min <= 0.0 {
        return Err(Error::Domain(
            "direct integration needs a non-saturated fit (SSE > 0)".into(),
        ));
    }
    let w_lo = 0.5 * (sse_min / 1400.0).ln();
    let w_hi = 0.5 * (sse_min / nf).ln() + 5.0 + 45.0 / (n - ds.k0()) as f64;
    // Inner variables are rescaled to unit-width structure: the likelihood
    // constrains b0 at scale sigma/|x0| and bi at scale sigma/|v|, while the
    // prior holds bi at prior_sd. Without this, large-sigma nodes put all
    // their mass beyond the resolution of the half-line transform.
    let x0_norm = x0.norm();
    let value = integrate_log(
        |w| {
            let sigma = w.exp();
            let b0_scale = sigma / x0_norm;
            match (&xi, vtv) {
                (Some(x), Some(vtv)) => {
                    let prior_sd = (g * sigma * sigma / vtv).sqrt();
                    let bi_scale = prior_sd.max(sigma / vtv.sqrt());
                    integrate_log_real_line(
                        |s_bi| {
                            let bi = s_bi * bi_scale;
                            // Profile bound over b0: nodes this far down
                            // cannot move the total, and integrating them
                            // would only stir log-scale rounding noise.
                            let r = &y - x * bi;
                            let b0_star = x0.dot(&r) / (x0_norm * x0_norm);
                            let ss_prof = (&r - &x0 * b0_star).norm_squared();
                            let peak_ln =
                                -0.5 * nf * (ln_two_pi + 2.0 * sigma.ln()) - ss_prof / (2.0 * sigma * sigma);
                            if peak_ln < -4000.0 {
                                return f64::NEG_INFINITY;
                            }
                            let ln_b0 = integrate_log_real_line(
                                |s_b0| ln_lik(s_b0 * b0_scale, bi, sigma),
                                inner_tol,
                            )
                            .map(|r| r.value + b0_scale.ln())
                            .unwrap_or_else(|e| record(e));
                            let ln_prior_bi = -0.5 * (ln_two_pi + 2.0 * prior_sd.ln())
                                - bi * bi / (2.0 * prior_sd * prior_sd);
                            ln_b0 + ln_prior_bi + bi_scale.ln()
                        },
                        mid_tol,
                    )
                    .map(|r| r.value)
                    .unwrap_or_else(|e| record(e))
                }
                _ => integrate_log_real_line(|s_b0| ln_lik(s_b0 * b0_scale, 0.0, sigma), mid_tol)
                    .map(|r| r.value + b0_scale.ln())
                    .unwrap_or_else(|e| record(e)),
            }
        },
        w_lo,
        w_hi,
        outer_tol,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(value.value)
}

/// Configuration for the model-selection consistency simulation.
#[derive(Debug, Clone)]
pub struct ConsistencyConfig {
    pub p: usize,
    pub true_model: ModelId,
    /// Coefficients for the true model's covariates, in ascending bit order.
    pub coefficients: Vec<f64>,
    pub sigma: f64,
    pub n_grid: Vec<usize>,
    pub replicates: u32,
    pub seed: u64,
}

/// One simulated cell: the posterior probability of the data-generating
/// model at sample size `n` for one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyRow {
    pub n: usize,
    pub replicate: u32,
    pub model_mask: u64,
    pub posterior_prob: f64,
}

/// A Box-Muller standard normal draw.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Simulate datasets from a fixed true model (covariates drawn i.i.d.
/// standard normal, intercept-only fixed block) and record the posterior
/// probability of the truth at each sample size. Replicates run in parallel
/// on independent, replicate-keyed generator streams; the output order is
/// `(n, replicate)` regardless of scheduling.
pub fn consistency_simulator(cfg: &ConsistencyConfig) -> Result<Vec<ConsistencyRow>> {
    if cfg.true_model.mask() >> cfg.p != 0 {
        return Err(Error::Config("true model uses covariates outside 0..p".into()));
    }
    if cfg.coefficients.len() != cfg.true_model.dimension() {
        return Err(Error::Config(format!(
            "{} coefficients for a true model of dimension {}",
            cfg.coefficients.len(),
            cfg.true_model.dimension()
        )));
    }
    if !(cfg.sigma >= 0.0) {
        return Err(Error::Config(format!("sigma must be nonnegative, got {}", cfg.sigma)));
    }
    if cfg.replicates == 0 || cfg.n_grid.is_empty() {
        return Err(Error::Config("need at least one replicate and one sample size".into()));
    }

    let cells: Vec<(usize, usize, u32)> = cfg
        .n_grid
        .iter()
        .enumerate()
        .flat_map(|(ni, &n)| (0..cfg.replicates).map(move |r| (ni, n, r)))
        .collect();

    let hp = Hyperparameters::recommended();
    let true_cols = cfg.true_model.columns();

    let mut rows: Vec<ConsistencyRow> = cells
        .par_iter()
        .map(|&(ni, n, rep)| -> Result<ConsistencyRow> {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            rng.set_stream(((ni as u64) << 32) | rep as u64);
            let mut x = nalgebra::DMatrix::zeros(n, cfg.p);
            for v in x.iter_mut() {
                *v = standard_normal(&mut rng);
            }
            let mut y = nalgebra::DVector::zeros(n);
            for i in 0..n {
                let mut mu = 0.0;
                for (c, &col) in true_cols.iter().enumerate() {
                    mu += cfg.coefficients[c] * x[(i, col)];
                }
                y[i] = mu + cfg.sigma * standard_normal(&mut rng);
            }
            let names = (0..cfg.p).map(|j| format!("x{j}")).collect();
            let ds = Dataset::with_intercept(y, x, names)?;
            let score = score_enumeration(&ds, &hp, None, &EvalOptions::default())?;
            let prob = score
                .summary
                .model_probs
                .iter()
                .find(|(m, _)| *m == cfg.true_model)
                .map(|(_, q)| *q)
                .unwrap_or(0.0);
            Ok(ConsistencyRow {
                n,
                replicate: rep,
                model_mask: cfg.true_model.mask(),
                posterior_prob: prob,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| (r.n, r.replicate));
    Ok(rows)
}

/// Write the simulation table as TSV with columns
/// `n  replicate  model_mask  posterior_prob`.
pub fn write_consistency_tsv<W: Write>(rows: &[ConsistencyRow], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "n\treplicate\tmodel_mask\tposterior_prob")?;
    for r in rows {
        writeln!(out, "{}\t{}\t{}\t{}", r.n, r.replicate, r.model_mask, r.posterior_prob)?;
    }
    Ok(())
}
