//! Least-squares machinery: the fixed-block projection, per-model residual
//! sums of squares, and the SSE ratio that drives every Bayes factor.
//!
//! Fits go through orthogonal decompositions only. Normal equations square
//! the condition number and are never formed outside of test oracles.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model_space::{Dataset, ModelId};

/// SSE below `SSE_ZERO_FLOOR * ||y||^2` is treated as an exact zero
/// (saturated fit); this stabilizes Q near 0.
pub const SSE_ZERO_FLOOR: f64 = 1e-12;

/// Everything the evidence computation needs to know about one fitted model.
#[derive(Debug, Clone)]
pub struct ModelFit {
    pub model: ModelId,
    pub k_i: usize,
    /// Residual sum of squares of the least-squares fit (floored to 0 when
    /// saturated).
    pub sse: f64,
    /// `SSE_i / SSE_0`, clamped to [0, 1].
    pub q_i0: f64,
    /// Log Bayes factor against the null; filled in by the evidence layer.
    pub log_bf: Option<f64>,
}

/// Rank tolerance for a design matrix: `n * eps * max column norm`.
fn rank_tolerance(design: &DMatrix<f64>) -> f64 {
    let max_norm = (0..design.ncols())
        .map(|j| design.column(j).norm())
        .fold(0.0f64, f64::max);
    design.nrows() as f64 * f64::EPSILON * max_norm
}

/// Pivoted Gram-Schmidt rank check. Returns the names of columns that are
/// numerically inside the span of the columns chosen before them.
fn collinear_columns(design: &DMatrix<f64>, names: &[String]) -> Vec<String> {
    let tol = rank_tolerance(design);
    let ncols = design.ncols();
    let mut work: Vec<DVector<f64>> = (0..ncols).map(|j| design.column(j).into_owned()).collect();
    let mut alive: Vec<usize> = (0..ncols).collect();
    let mut offending = Vec::new();
    while !alive.is_empty() {
        // Pick the remaining column with the largest residual norm.
        let (pos, &best) = alive
            .iter()
            .enumerate()
            .max_by(|a, b| work[*a.1].norm().total_cmp(&work[*b.1].norm()))
            .expect("alive is nonempty");
        if work[best].norm() <= tol {
            // Everything left is in the span of the accepted columns.
            let mut rest: Vec<usize> = alive.clone();
            rest.sort_unstable();
            offending.extend(rest.into_iter().map(|j| names[j].clone()));
            break;
        }
        alive.remove(pos);
        let q = work[best].normalize();
        for &j in &alive {
            let proj = q.dot(&work[j]);
            work[j] -= &q * proj;
        }
    }
    offending
}

fn check_full_rank(design: &DMatrix<f64>, names: &[String]) -> Result<()> {
    if design.ncols() == 0 {
        return Ok(());
    }
    if design.nrows() < design.ncols() {
        return Err(Error::InsufficientData { n: design.nrows(), cols: design.ncols() });
    }
    let offending = collinear_columns(design, names);
    if offending.is_empty() {
        Ok(())
    } else {
        Err(Error::SingularDesign { columns: offending })
    }
}

/// Thin-QR least squares: returns (coefficients, residual).
fn lstsq(design: &DMatrix<f64>, y: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    if design.ncols() == 0 {
        return (DVector::zeros(0), y.clone());
    }
    let qr = design.clone().qr();
    let qty = qr.q().transpose() * y;
    let beta = qr
        .r()
        .solve_upper_triangular(&qty)
        .unwrap_or_else(|| DVector::zeros(design.ncols()));
    let resid = y - design * &beta;
    (beta, resid)
}

/// The candidate block of model `m` with the fixed-block component projected
/// out: `V = (I - X0 (X0' X0)^-1 X0') X_m`. With an empty fixed block this is
/// the candidate block itself.
pub fn residual_design(ds: &Dataset, m: ModelId) -> Result<DMatrix<f64>> {
    let xm = ds.candidate_block(m);
    if ds.k0() == 0 || xm.ncols() == 0 {
        return Ok(xm);
    }
    check_full_rank(&ds.design(m), &ds.design_names(m))?;
    let x0 = ds.x0();
    let qr = x0.clone().qr();
    let r = qr.r();
    let qt_xm = qr.q().transpose() * &xm;
    let mut v = xm.clone();
    for j in 0..xm.ncols() {
        let coef = r
            .solve_upper_triangular(&qt_xm.column(j).into_owned())
            .unwrap_or_else(|| DVector::zeros(x0.ncols()));
        let fitted = x0 * coef;
        v.set_column(j, &(xm.column(j) - fitted));
    }
    Ok(v)
}

/// Least-squares SSE of model `m`: `min_beta || y - [X0 | X_m] beta ||^2`,
/// with the saturated-fit floor applied.
pub fn fit_sse(ds: &Dataset, m: ModelId) -> Result<f64> {
    let design = ds.design(m);
    check_full_rank(&design, &ds.design_names(m))?;
    let (_, resid) = lstsq(&design, ds.y());
    let sse = resid.norm_squared();
    let floor = SSE_ZERO_FLOOR * ds.y().norm_squared();
    Ok(if sse < floor { 0.0 } else { sse })
}

/// `Q_i0 = SSE_i / SSE_0`, clamped to [0, 1]. A zero (or floored) null SSE
/// means the fixed block alone already explains the response exactly and no
/// ratio is defined.
pub fn q_ratio(sse_i: f64, sse_0: f64) -> Result<f64> {
    if !(sse_0 > 0.0) {
        return Err(Error::DegenerateNull { sse0: sse_0 });
    }
    if sse_i < 0.0 {
        return Err(Error::Domain(format!("negative SSE: {sse_i}")));
    }
    Ok((sse_i / sse_0).clamp(0.0, 1.0))
}

/// ln |X' X| through the QR of X; 0 for an empty block.
pub fn log_det_gram(x: &DMatrix<f64>) -> f64 {
    if x.ncols() == 0 {
        return 0.0;
    }
    let qr = x.clone().qr();
    let r = qr.r();
    (0..x.ncols()).map(|j| 2.0 * r[(j, j)].abs().ln()).sum()
}

/// Fit model `m` and attach its Q statistic against the supplied null SSE.
pub fn fit_model(ds: &Dataset, m: ModelId, sse_0: f64) -> Result<ModelFit> {
    let sse = if m.is_null() { sse_0 } else { fit_sse(ds, m)? };
    let q_i0 = q_ratio(sse, sse_0)?;
    Ok(ModelFit { model: m, k_i: m.dimension(), sse, q_i0, log_bf: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn random_dataset(seed: u64, n: usize, p: usize) -> Dataset {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut normal = || {
            let u1: f64 = rng.random::<f64>().max(1e-12);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let x = DMatrix::from_fn(n, p, |_, _| normal());
        let y = DVector::from_fn(n, |i, _| x[(i, 0)] + 0.5 * normal());
        let names = (0..p).map(|j| format!("x{j}")).collect();
        Dataset::with_intercept(y, x, names).unwrap()
    }

    #[test]
    fn residualized_ones_column_is_centered() {
        let y = DVector::from_vec(vec![1.0, 2.0, 4.0]);
        let x = DMatrix::from_vec(3, 1, vec![1.0, 2.0, 6.0]);
        let ds = Dataset::with_intercept(y, x, vec!["x0".into()]).unwrap();
        let v = residual_design(&ds, ModelId::from_mask(1, 1).unwrap()).unwrap();
        let mean = 3.0;
        for i in 0..3 {
            assert!((v[(i, 0)] - (ds.x()[(i, 0)] - mean)).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_design_is_orthogonal_to_fixed_block() {
        let ds = random_dataset(7, 10, 3);
        let m = ModelId::from_mask(0b111, 3).unwrap();
        let v = residual_design(&ds, m).unwrap();
        let cross = ds.x0().transpose() * &v;
        let scale = ds.x0().norm() * v.norm();
        for e in cross.iter() {
            assert!(e.abs() <= 1e-10 * scale.max(1.0), "X0'V entry {e}");
        }
    }

    #[test]
    fn residual_design_identity_when_orthogonal() {
        // Candidate column already orthogonal to the intercept (sums to 0).
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let x = DMatrix::from_vec(4, 1, vec![-1.5, -0.5, 0.5, 1.5]);
        let ds = Dataset::with_intercept(y, x.clone(), vec!["c".into()]).unwrap();
        let v = residual_design(&ds, ModelId::from_mask(1, 1).unwrap()).unwrap();
        for i in 0..4 {
            assert!((v[(i, 0)] - x[(i, 0)]).abs() < 1e-14);
        }
    }

    #[test]
    fn null_sse_is_centered_sum_of_squares() {
        let ds = random_dataset(3, 25, 2);
        let sse0 = fit_sse(&ds, ModelId::NULL).unwrap();
        let mean = ds.y().mean();
        let direct: f64 = ds.y().iter().map(|v| (v - mean).powi(2)).sum();
        assert!((sse0 - direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn exact_fit_gives_zero_sse() {
        let x = DMatrix::from_vec(3, 1, vec![1.0, 2.0, 6.0]);
        let y = DVector::from_vec(vec![2.0, 4.0, 12.0]); // y = 2 x, in span
        let ds = Dataset::with_intercept(y, x, vec!["x0".into()]).unwrap();
        let sse = fit_sse(&ds, ModelId::from_mask(1, 1).unwrap()).unwrap();
        assert_eq!(sse, 0.0);
    }

    #[test]
    fn saturated_fit_gives_zero_sse() {
        // n = k0 + k_i: the design absorbs everything.
        let ds = random_dataset(11, 3, 2);
        let sse = fit_sse(&ds, ModelId::from_mask(0b11, 2).unwrap()).unwrap();
        assert_eq!(sse, 0.0);
    }

    #[test]
    fn collinear_design_is_rejected_with_names() {
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let mut x = DMatrix::zeros(4, 2);
        for i in 0..4 {
            x[(i, 0)] = i as f64;
            x[(i, 1)] = 2.0 * i as f64; // exact duplicate direction
        }
        let ds = Dataset::with_intercept(y, x, vec!["a".into(), "b".into()]).unwrap();
        match fit_sse(&ds, ModelId::from_mask(0b11, 2).unwrap()) {
            Err(Error::SingularDesign { columns }) => {
                assert_eq!(columns.len(), 1);
                assert!(columns[0] == "a" || columns[0] == "b");
            }
            other => panic!("expected singular-design error, got {other:?}"),
        }
    }

    #[test]
    fn too_few_rows_is_insufficient_data() {
        let ds = random_dataset(5, 2, 3);
        let r = fit_sse(&ds, ModelId::from_mask(0b111, 3).unwrap());
        assert!(matches!(r, Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn q_ratio_basics() {
        assert_eq!(q_ratio(6.4, 6.4).unwrap(), 1.0);
        assert_eq!(q_ratio(0.0, 2.0).unwrap(), 0.0);
        assert_eq!(q_ratio(3.2, 6.4).unwrap(), 0.5);
        assert!(matches!(q_ratio(1.0, 0.0), Err(Error::DegenerateNull { .. })));
    }

    #[test]
    fn nesting_monotonicity() {
        let ds = random_dataset(23, 30, 4);
        for sub in [0b0001u64, 0b0010, 0b0101, 0b0011] {
            for sup in [0b0111u64, 0b1111, 0b1011] {
                if sub & sup != sub {
                    continue;
                }
                let s_sub = fit_sse(&ds, ModelId::from_mask(sub, 4).unwrap()).unwrap();
                let s_sup = fit_sse(&ds, ModelId::from_mask(sup, 4).unwrap()).unwrap();
                assert!(s_sup <= s_sub + 1e-10 * s_sub, "nesting violated: {s_sup} > {s_sub}");
            }
        }
    }

    #[test]
    fn sse_matches_projector_oracle() {
        // Explicit projection-matrix computation (fine as a test oracle).
        let ds = random_dataset(29, 20, 3);
        for mask in 1..8u64 {
            let m = ModelId::from_mask(mask, 3).unwrap();
            let d = ds.design(m);
            let gram = d.transpose() * &d;
            let proj = &d * gram.try_inverse().unwrap() * d.transpose();
            let fitted = &proj * ds.y();
            let direct = (ds.y() - fitted).norm_squared();
            let qr_based = fit_sse(&ds, m).unwrap();
            assert!(
                (qr_based - direct).abs() <= 1e-10 * direct.max(1e-30),
                "mask {mask}: {qr_based} vs {direct}"
            );
        }
    }

    #[test]
    fn unit_invariance_of_q() {
        let ds = random_dataset(31, 18, 3);
        let m = ModelId::from_mask(0b101, 3).unwrap();
        let sse0 = fit_sse(&ds, ModelId::NULL).unwrap();
        let q = q_ratio(fit_sse(&ds, m).unwrap(), sse0).unwrap();

        // y -> c y scales every SSE by c^2 and leaves Q alone.
        let c = 37.5;
        let ds_y = Dataset::new(
            ds.y() * c,
            ds.x0().clone(),
            ds.x().clone(),
            ds.fixed_names().to_vec(),
            ds.candidate_names().to_vec(),
        )
        .unwrap();
        let sse0_y = fit_sse(&ds_y, ModelId::NULL).unwrap();
        assert!((sse0_y - c * c * sse0).abs() < 1e-9 * sse0_y);
        let q_y = q_ratio(fit_sse(&ds_y, m).unwrap(), sse0_y).unwrap();
        assert!((q_y - q).abs() < 1e-12);

        // Rescaling a candidate column changes nothing at all.
        let mut x_scaled = ds.x().clone();
        x_scaled.set_column(2, &(ds.x().column(2) * 1e3));
        let ds_x = Dataset::new(
            ds.y().clone(),
            ds.x0().clone(),
            x_scaled,
            ds.fixed_names().to_vec(),
            ds.candidate_names().to_vec(),
        )
        .unwrap();
        let q_x = q_ratio(fit_sse(&ds_x, m).unwrap(), sse0).unwrap();
        assert!((q_x - q).abs() < 1e-10);
    }

    #[test]
    fn log_det_gram_matches_direct() {
        let ds = random_dataset(41, 12, 2);
        let x0 = ds.x0();
        let direct = (x0.transpose() * x0).determinant().ln();
        assert!((log_det_gram(x0) - direct).abs() < 1e-10);
    }
}
