//! Adaptive Gauss-Kronrod quadrature, in linear and in log scale.
//!
//! The log-scale entry point integrates `exp(f)` for a log-integrand `f`
//! without ever forming `exp(f)` at full magnitude: each 15-point panel is
//! max-shifted before summing, panels combine through log-sum-exp, and the
//! error estimate lives on the same log scale. Semi-infinite upper limits are
//! mapped to `[0, 1)` with `t = lo + u/(1-u)`.

use crate::error::{Error, Result};
use crate::special_functions::{log_add_exp, log_sum_exp};

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    /// The integral; for the log-scale routines this is ln of the integral.
    pub value: f64,
    /// Estimated absolute error. For log-scale routines it is relative to the
    /// integral, i.e. an absolute error on `value` itself.
    pub abs_error_estimate: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) and the embedded
// 7-point Gauss weights; standard QUADPACK constants.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const MAX_PANELS: usize = 4000;

/// A panel is unsplittable once its midpoint collides with an endpoint in
/// floating point. Near zero this allows very deep refinement, which is what
/// integrable endpoint singularities need.
fn unsplittable(a: f64, b: f64) -> bool {
    let mid = 0.5 * (a + b);
    mid <= a || mid >= b
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
        return Err(Error::Config(format!(
            "quadrature rel_tol must lie in (1e-14, 1e-2), got {rel_tol}"
        )));
    }
    Ok(())
}

/// One 15-point panel of a linear-scale integrand.
fn panel_linear<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, usize) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = 0.0;
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    gauss += fc * WG[3];
    let value = kron * half;
    let err = ((kron - gauss) * half).abs();
    (value, err, 15)
}

/// One 15-point panel of a log-scale integrand: returns the log of the panel
/// integral and the log of its error estimate.
fn panel_log<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, usize) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut ln_f = [f64::NEG_INFINITY; 15];
    ln_f[14] = f(center);
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        ln_f[2 * j] = f(center - dx);
        ln_f[2 * j + 1] = f(center + dx);
    }
    let m = ln_f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, f64::NEG_INFINITY, 15);
    }
    let mut kron = WGK[7] * (ln_f[14] - m).exp();
    let mut gauss = 0.0;
    for j in 0..7 {
        let pair = (ln_f[2 * j] - m).exp() + (ln_f[2 * j + 1] - m).exp();
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    gauss += WG[3] * (ln_f[14] - m).exp();
    let log_value = m + (kron * half).ln();
    let diff = (kron - gauss).abs() * half;
    let log_err = if diff == 0.0 { f64::NEG_INFINITY } else { m + diff.ln() };
    (log_value, log_err, 15)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64, // log scale for the log engine
    err: f64,   // log scale for the log engine
}

/// Integrate a (possibly signed) integrand over the finite interval `[lo, hi]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<QuadratureResult> {
    check_rel_tol(rel_tol)?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Config("linear-scale integration needs finite bounds".into()));
    }
    let (value, err, evals) = panel_linear(&f, lo, hi);
    let mut panels = vec![Panel { a: lo, b: hi, value, err }];
    let mut evaluations = evals;
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        let target = rel_tol * total.abs().max(1e-300);
        if total_err <= target {
            return Ok(QuadratureResult { value: total, abs_error_estimate: total_err, evaluations });
        }
        // Split the worst panel.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        if unsplittable(p.a, p.b) || panels.len() + 2 > MAX_PANELS {
            return Err(Error::Numeric(format!(
                "quadrature did not reach rel_tol {rel_tol}: worst subinterval [{}, {}] with error {:.3e}",
                p.a, p.b, p.err
            )));
        }
        let mid = 0.5 * (p.a + p.b);
        for (a, b) in [(p.a, mid), (mid, p.b)] {
            let (value, err, evals) = panel_linear(&f, a, b);
            evaluations += evals;
            panels.push(Panel { a, b, value, err });
        }
    }
}

/// Integrate `exp(f)` over `[lo, hi]` (with `hi = inf` allowed), returning
/// the log of the integral. `f` must return ln of a nonnegative integrand;
/// `-inf` marks zeros, and the integrand is never evaluated at the endpoints.
pub fn integrate_log<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    check_rel_tol(rel_tol)?;
    if !lo.is_finite() {
        return Err(Error::Config("lower integration bound must be finite".into()));
    }
    if hi.is_finite() {
        integrate_log_finite(&f, lo, hi, rel_tol)
    } else {
        // t = lo + u/(1-u) maps [0,1) onto [lo, inf); dt = du/(1-u)^2.
        let g = |u: f64| {
            let one_minus = 1.0 - u;
            f(lo + u / one_minus) - 2.0 * one_minus.ln()
        };
        integrate_log_finite(&g, 0.0, 1.0, rel_tol)
    }
}

/// Integrate `exp(f)` over the whole real line (log scale), splitting at 0.
pub fn integrate_log_real_line<F: Fn(f64) -> f64>(f: F, rel_tol: f64) -> Result<QuadratureResult> {
    let right = integrate_log(|t| f(t), 0.0, f64::INFINITY, rel_tol)?;
    let left = integrate_log(|t| f(-t), 0.0, f64::INFINITY, rel_tol)?;
    Ok(QuadratureResult {
        value: log_add_exp(left.value, right.value),
        abs_error_estimate: left.abs_error_estimate.max(right.abs_error_estimate),
        evaluations: left.evaluations + right.evaluations,
    })
}

fn integrate_log_finite<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    let (value, err, evals) = panel_log(f, lo, hi);
    let mut panels = vec![Panel { a: lo, b: hi, value, err }];
    let mut evaluations = evals;
    let log_rel_tol = rel_tol.ln();
    loop {
        let log_total = log_sum_exp(&panels.iter().map(|p| p.value).collect::<Vec<_>>());
        let log_total_err = log_sum_exp(&panels.iter().map(|p| p.err).collect::<Vec<_>>());
        if log_total == f64::NEG_INFINITY {
            // Integrand vanished everywhere we looked.
            return Ok(QuadratureResult {
                value: f64::NEG_INFINITY,
                abs_error_estimate: 0.0,
                evaluations,
            });
        }
        if log_total_err <= log_rel_tol + log_total {
            return Ok(QuadratureResult {
                value: log_total,
                abs_error_estimate: (log_total_err - log_total).exp(),
                evaluations,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        if unsplittable(p.a, p.b) || panels.len() + 2 > MAX_PANELS {
            return Err(Error::Numeric(format!(
                "log-scale quadrature did not reach rel_tol {rel_tol}: worst subinterval \
                 [{}, {}] with log-error {:.3}",
                p.a, p.b, p.err
            )));
        }
        let mid = 0.5 * (p.a + p.b);
        for (a, b) in [(p.a, mid), (mid, p.b)] {
            let (value, err, evals) = panel_log(f, a, b);
            evaluations += evals;
            panels.push(Panel { a, b, value, err });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate(|_| 1.0, 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
        assert!(r.evaluations >= 1);
    }

    #[test]
    fn exponential_tail_to_infinity() {
        let r = integrate_log(|t: f64| -t, 0.0, f64::INFINITY, 1e-10).unwrap();
        assert!(r.value.abs() < 1e-10, "log integral of e^-t should be 0, got {}", r.value);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // lambda^{-1/2} integrates to 2 on [0,1].
        let r = integrate_log(|t: f64| -0.5 * t.ln(), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 2.0f64.ln()).abs() < 1e-10, "got {}", r.value);
    }

    #[test]
    fn huge_magnitudes_stay_in_log_scale() {
        // integral of exp(1000) * e^{-t} over [0, inf) = exp(1000).
        let r = integrate_log(|t: f64| 1000.0 - t, 0.0, f64::INFINITY, 1e-10).unwrap();
        assert!((r.value - 1000.0).abs() < 1e-10);
    }

    #[test]
    fn split_invariance() {
        // A smooth positive integrand; compare whole against split at 0.37.
        let f = |t: f64| (1.2 + (3.0 * t).sin()).ln();
        let whole = integrate_log(f, 0.0, 1.0, 1e-11).unwrap().value;
        let a = integrate_log(f, 0.0, 0.37, 1e-11).unwrap().value;
        let b = integrate_log(f, 0.37, 1.0, 1e-11).unwrap().value;
        assert!((log_add_exp(a, b) - whole).abs() < 1e-11);
    }

    #[test]
    fn gaussian_full_line() {
        let r = integrate_log_real_line(|t| -0.5 * t * t, 1e-10).unwrap();
        let expect = (2.0 * std::f64::consts::PI).sqrt().ln();
        assert!((r.value - expect).abs() < 1e-10);
    }

    #[test]
    fn rel_tol_domain_enforced() {
        assert!(integrate(|_| 1.0, 0.0, 1.0, 0.5).is_err());
        assert!(integrate(|_| 1.0, 0.0, 1.0, 1e-15).is_err());
    }

    #[test]
    fn signed_linear_integrand() {
        let r = integrate(|t: f64| t.sin(), 0.0, std::f64::consts::PI, 1e-10).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
    }
}
