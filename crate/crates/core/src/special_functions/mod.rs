//! Numerics substrate: log-gamma, incomplete gamma, the Gauss hypergeometric
//! function for nonpositive argument, and adaptive quadrature.
//!
//! Everything evidence-facing works in log scale. The quantities fed to Bayes
//! factors involve powers like `Q^{-(n-k0)/2}` that overflow doubles for `n`
//! in the low hundreds, so linear-scale intermediates are not an option.

mod gamma;
mod hyp2f1;
mod quadrature;

pub use gamma::{log_gamma, log_gamma_checked, log_lower_incomplete_gamma, log_upper_incomplete_gamma};
pub use hyp2f1::{log_gauss_2f1, SignedLog};
pub use quadrature::{integrate, integrate_log, integrate_log_real_line, QuadratureResult};

/// ln(e^a + e^b) without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a.is_infinite() || b.is_infinite() {
        return f64::INFINITY;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln(e^a - e^b) for `a >= b`; `-inf` when they are equal.
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b, "log_sub_exp needs a >= b, got {a} < {b}");
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a == b {
        return f64::NEG_INFINITY;
    }
    a + (-(b - a).exp()).ln_1p()
}

/// Max-shifted ln Σ e^{x_i}. Empty input gives `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        // All -inf, or some +inf: the max already tells the story.
        return m;
    }
    let sum: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + sum.ln()
}
