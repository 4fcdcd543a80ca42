//! The lattice of candidate models and its multiplicity-corrected prior odds.
//!
//! With `p` candidate covariates there are `2^p` models, each identified by a
//! bitmask over the candidates. The fixed block (usually just an intercept)
//! is present in every model; the null model is the empty mask.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::special_functions::log_gamma;

/// Largest supported number of candidate covariates. Masks are `u64` and
/// enumeration beyond this is infeasible anyway.
pub const MAX_CANDIDATES: usize = 62;

/// A model in the `2^p` lattice, as a bitmask over candidate covariates.
///
/// Bit `j` set means candidate column `j` is included. The fixed block is
/// implicit and always present. Ordering is plain mask order, which keeps
/// reports and golden files reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModelId(u64);

impl ModelId {
    /// The null model: no candidate covariates.
    pub const NULL: ModelId = ModelId(0);

    /// Build from a raw mask, checking that no bit at position `>= p` is set.
    pub fn from_mask(mask: u64, p: usize) -> Result<ModelId> {
        if p > MAX_CANDIDATES {
            return Err(Error::Config(format!(
                "p = {p} exceeds the supported maximum of {MAX_CANDIDATES} candidates"
            )));
        }
        if p < 64 && mask >> p != 0 {
            return Err(Error::Config(format!(
                "mask {mask:#b} has bits set at positions >= p = {p}"
            )));
        }
        Ok(ModelId(mask))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    /// Number of included candidate covariates, `k_i`.
    pub fn dimension(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, j: usize) -> bool {
        j < 64 && self.0 >> j & 1 == 1
    }

    pub fn flip(self, j: usize) -> ModelId {
        ModelId(self.0 ^ (1 << j))
    }

    pub fn is_null(self) -> bool {
        self.0 == 0
    }

    /// Indices of the included candidate columns, ascending.
    pub fn columns(self) -> Vec<usize> {
        (0..64).filter(|&j| self.contains(j)).collect()
    }

    /// True if every covariate of `other` is also in `self`.
    pub fn contains_model(self, other: ModelId) -> bool {
        self.0 & other.0 == other.0
    }
}

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#b}", self.0)
    }
}

/// Dimension of a model (popcount of its mask).
pub fn model_dimension(m: ModelId) -> usize {
    m.dimension()
}

/// Lazily enumerate all models with at most `max_dim` covariates, in
/// ascending mask order. With `max_dim = None` this is all `2^p` models.
pub fn enumerate_models(p: usize, max_dim: Option<usize>) -> Result<ModelIter> {
    if p > MAX_CANDIDATES {
        return Err(Error::Config(format!(
            "p = {p} exceeds the supported maximum of {MAX_CANDIDATES} candidates"
        )));
    }
    if let Some(d) = max_dim {
        if d > p {
            return Err(Error::Config(format!("max_dim = {d} exceeds p = {p}")));
        }
    }
    Ok(ModelIter {
        next: 0,
        end: 1u64 << p,
        max_dim: max_dim.map(|d| d as u32),
    })
}

/// Iterator over masks; O(1) state regardless of `p`.
pub struct ModelIter {
    next: u64,
    end: u64,
    max_dim: Option<u32>,
}

impl Iterator for ModelIter {
    type Item = ModelId;

    fn next(&mut self) -> Option<ModelId> {
        while self.next < self.end {
            let mask = self.next;
            self.next += 1;
            if self.max_dim.is_none_or(|d| mask.count_ones() <= d) {
                return Some(ModelId(mask));
            }
        }
        None
    }
}

/// Multiplicity-corrected log prior odds of model `m` against the null:
/// `P_j0 = k_j! (p - k_j)! / p!`, computed through log-gamma so large `p`
/// cannot overflow. The null model gets exactly 0.
pub fn scott_berger_prior_odds(m: ModelId, p: usize) -> f64 {
    let k = m.dimension();
    assert!(k <= p, "model dimension {k} exceeds p = {p}");
    if k == 0 {
        return 0.0;
    }
    log_gamma((k + 1) as f64) + log_gamma((p - k + 1) as f64) - log_gamma((p + 1) as f64)
}

/// Total prior-odds mass of the full lattice under the multiplicity
/// correction: each dimension contributes 1, so the sum over all `2^p`
/// models is `p + 1`. Used to report honest coverage for truncated scans.
pub fn scott_berger_total_log_mass(p: usize) -> f64 {
    ((p + 1) as f64).ln()
}

/// How the mixing-density scale `rho_i` is chosen per model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoRule {
    /// `rho_i = 1 / (k0 + k_i)`, the recommended default.
    Recommended,
    /// A fixed user-supplied value (validated against the support constraint).
    Constant(f64),
    /// `rho_i = 1 / (1 + n)` with `a = 1/2`, `b = 1`.
    HyperG,
    /// `rho_i = 1/2` with `a = 1/2` and `b = n`.
    HyperGOverN,
    /// `rho_i = 1 / (1 + n)` with `a = 1`, `b = 1`.
    CuiGeorge,
    /// `rho_i = (k_i + 1) / (k_i + 3)`, the original robust-estimation choice.
    BergerOriginal,
}

/// Hyperparameters `(a, b, rho-rule)` of the mixing density, plus an optional
/// known error standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparameters {
    pub a: f64,
    pub b: f64,
    pub rho_rule: RhoRule,
    pub sigma_known: Option<f64>,
}

impl Hyperparameters {
    /// The recommended prior: `a = 1/2`, `b = 1`, `rho_i = 1/(k0 + k_i)`.
    pub fn recommended() -> Self {
        Hyperparameters { a: 0.5, b: 1.0, rho_rule: RhoRule::Recommended, sigma_known: None }
    }

    pub fn hyper_g() -> Self {
        Hyperparameters { a: 0.5, b: 1.0, rho_rule: RhoRule::HyperG, sigma_known: None }
    }

    /// `b = n` is substituted at resolve time; the stored `b` is ignored.
    pub fn hyper_g_over_n() -> Self {
        Hyperparameters { a: 0.5, b: 1.0, rho_rule: RhoRule::HyperGOverN, sigma_known: None }
    }

    pub fn cui_george() -> Self {
        Hyperparameters { a: 1.0, b: 1.0, rho_rule: RhoRule::CuiGeorge, sigma_known: None }
    }

    pub fn berger_original() -> Self {
        Hyperparameters { a: 0.5, b: 1.0, rho_rule: RhoRule::BergerOriginal, sigma_known: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::InvalidHyperparameters(format!("a must be positive, got {}", self.a)));
        }
        if !(self.b > 0.0) || !self.b.is_finite() {
            return Err(Error::InvalidHyperparameters(format!("b must be positive, got {}", self.b)));
        }
        if let RhoRule::Constant(v) = self.rho_rule {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidHyperparameters(format!(
                    "constant rho must be positive, got {v}"
                )));
            }
        }
        if let Some(s) = self.sigma_known {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidHyperparameters(format!(
                    "known sigma must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }
}

/// A regression problem: response `y`, fixed design `x0` (always included,
/// may be empty), and the `p` candidate columns `x`.
#[derive(Debug, Clone)]
pub struct Dataset {
    y: DVector<f64>,
    x0: DMatrix<f64>,
    x: DMatrix<f64>,
    fixed_names: Vec<String>,
    candidate_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        y: DVector<f64>,
        x0: DMatrix<f64>,
        x: DMatrix<f64>,
        fixed_names: Vec<String>,
        candidate_names: Vec<String>,
    ) -> Result<Dataset> {
        let n = y.len();
        if n == 0 {
            return Err(Error::Config("dataset has no rows".into()));
        }
        if x0.ncols() > 0 && x0.nrows() != n {
            return Err(Error::Config(format!(
                "fixed design has {} rows but y has {n}",
                x0.nrows()
            )));
        }
        if x.ncols() > 0 && x.nrows() != n {
            return Err(Error::Config(format!(
                "candidate design has {} rows but y has {n}",
                x.nrows()
            )));
        }
        if x.ncols() > MAX_CANDIDATES {
            return Err(Error::Config(format!(
                "{} candidate columns exceed the supported maximum of {MAX_CANDIDATES}",
                x.ncols()
            )));
        }
        if fixed_names.len() != x0.ncols() {
            return Err(Error::Config("fixed column names do not match the fixed design".into()));
        }
        if candidate_names.len() != x.ncols() {
            return Err(Error::Config(
                "candidate column names do not match the candidate design".into(),
            ));
        }
        // Normalize the shapes of empty blocks so n is consistent everywhere.
        let x0 = if x0.ncols() == 0 { DMatrix::zeros(n, 0) } else { x0 };
        let x = if x.ncols() == 0 { DMatrix::zeros(n, 0) } else { x };
        Ok(Dataset { y, x0, x, fixed_names, candidate_names })
    }

    /// Convenience constructor with an all-ones fixed column.
    pub fn with_intercept(
        y: DVector<f64>,
        x: DMatrix<f64>,
        candidate_names: Vec<String>,
    ) -> Result<Dataset> {
        let n = y.len();
        let ones = DMatrix::from_element(n, 1, 1.0);
        Dataset::new(y, ones, x, vec!["(intercept)".into()], candidate_names)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn k0(&self) -> usize {
        self.x0.ncols()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn x0(&self) -> &DMatrix<f64> {
        &self.x0
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn fixed_names(&self) -> &[String] {
        &self.fixed_names
    }

    pub fn candidate_names(&self) -> &[String] {
        &self.candidate_names
    }

    /// Candidate columns selected by `m`, as an `n x k_i` matrix.
    pub fn candidate_block(&self, m: ModelId) -> DMatrix<f64> {
        let cols = m.columns();
        let mut out = DMatrix::zeros(self.n(), cols.len());
        for (j, &c) in cols.iter().enumerate() {
            out.set_column(j, &self.x.column(c));
        }
        out
    }

    /// Full design `[x0 | x_m]` for model `m`.
    pub fn design(&self, m: ModelId) -> DMatrix<f64> {
        let xm = self.candidate_block(m);
        let k0 = self.k0();
        let mut out = DMatrix::zeros(self.n(), k0 + xm.ncols());
        for j in 0..k0 {
            out.set_column(j, &self.x0.column(j));
        }
        for j in 0..xm.ncols() {
            out.set_column(k0 + j, &xm.column(j));
        }
        out
    }

    /// Names of the design columns of model `m` (fixed block first).
    pub fn design_names(&self, m: ModelId) -> Vec<String> {
        let mut names = self.fixed_names.clone();
        for c in m.columns() {
            names.push(self.candidate_names[c].clone());
        }
        names
    }

    /// Names of just the selected candidate columns.
    pub fn selected_names(&self, m: ModelId) -> Vec<String> {
        m.columns().iter().map(|&c| self.candidate_names[c].clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_small() {
        let all: Vec<u64> = enumerate_models(2, None).unwrap().map(|m| m.mask()).collect();
        assert_eq!(all, vec![0b00, 0b01, 0b10, 0b11]);
    }

    #[test]
    fn enumerate_with_cap() {
        let caps: Vec<u64> = enumerate_models(3, Some(1)).unwrap().map(|m| m.mask()).collect();
        assert_eq!(caps, vec![0b000, 0b001, 0b010, 0b100]);
    }

    #[test]
    fn enumerate_large_is_lazy_and_complete() {
        let mut count = 0u64;
        let mut prev = None;
        for m in enumerate_models(20, None).unwrap() {
            if let Some(p) = prev {
                assert!(m.mask() > p);
            }
            prev = Some(m.mask());
            count += 1;
        }
        assert_eq!(count, 1 << 20);
    }

    #[test]
    fn enumerate_rejects_oversized_p() {
        assert!(matches!(enumerate_models(63, None), Err(Error::Config(_))));
        assert!(matches!(enumerate_models(4, Some(5)), Err(Error::Config(_))));
    }

    #[test]
    fn dimension_is_popcount() {
        assert_eq!(ModelId::from_mask(0, 4).unwrap().dimension(), 0);
        assert_eq!(ModelId::from_mask(0b101, 4).unwrap().dimension(), 2);
        assert_eq!(ModelId::from_mask(0b1111, 4).unwrap().dimension(), 4);
    }

    #[test]
    fn mask_width_is_checked() {
        assert!(ModelId::from_mask(0b100, 2).is_err());
        assert!(ModelId::from_mask(0b11, 2).is_ok());
    }

    #[test]
    fn prior_odds_null_is_zero() {
        assert_eq!(scott_berger_prior_odds(ModelId::NULL, 7), 0.0);
    }

    #[test]
    fn prior_odds_singleton() {
        // k = 1, p = 3: 1! 2! / 3! = 1/3
        let m = ModelId::from_mask(0b010, 3).unwrap();
        let lp = scott_berger_prior_odds(m, 3);
        assert!((lp - (1.0f64 / 3.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn prior_odds_symmetric_in_dimension() {
        for p in [4usize, 9] {
            for k in 0..=p {
                let m1 = ModelId::from_mask((1u64 << k) - 1, p).unwrap();
                let m2 = ModelId::from_mask(((1u64 << k) - 1) << (p - k), p).unwrap();
                assert_eq!(m1.dimension(), m2.dimension());
                assert_eq!(scott_berger_prior_odds(m1, p), scott_berger_prior_odds(m2, p));
            }
        }
    }

    #[test]
    fn total_prior_mass_is_p_plus_one() {
        for p in 1..=12usize {
            let total: f64 = enumerate_models(p, None)
                .unwrap()
                .map(|m| scott_berger_prior_odds(m, p).exp())
                .sum();
            assert!(
                (total - (p + 1) as f64).abs() < 1e-9,
                "p={p}: sum of prior odds {total}"
            );
        }
    }

    #[test]
    fn dataset_shape_checks() {
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = DMatrix::from_element(2, 1, 1.0);
        assert!(Dataset::with_intercept(y, x, vec!["x1".into()]).is_err());
    }
}
