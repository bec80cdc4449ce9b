use nalgebra::{DMatrix, DVector};

use super::fit::{inference, sandwich, Reference};
use super::{DesignMatrix, Family, FitResult, RobustSe, StatsError};

/// Relative residual norm below which a column counts as a combination of
/// the columns before it.
const RANK_TOL: f64 = 1e-10;

/// Indices of columns that are (numerically) linear combinations of earlier
/// columns, found by Gram-Schmidt with reorthogonalisation in column order.
pub fn linearly_dependent_columns(x: &DMatrix<f64>) -> Vec<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let norm = col.norm();
        let mut r = col;
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
        }
        let rn = r.norm();
        if norm == 0.0 || rn <= RANK_TOL * norm {
            dependent.push(j);
        } else {
            basis.push(r / rn);
        }
    }
    dependent
}

/// Least squares via Householder QR with HC0/HC1 sandwich standard errors and
/// t-distribution p-values on `n - k` degrees of freedom.
pub fn fit_ols(design: &DesignMatrix, robust: RobustSe) -> Result<FitResult, StatsError> {
    let x = &design.x;
    let y = &design.y;
    let (n, k) = x.shape();
    if n <= k {
        return Err(StatsError::InvalidModel(format!("{n} observations for {k} columns")));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(StatsError::Numeric("non-finite value in design".into()));
    }
    let dependent = linearly_dependent_columns(x);
    if !dependent.is_empty() {
        return Err(StatsError::RankDeficient(dependent.into_iter().map(|j| design.names[j].clone()).collect()));
    }

    let qr = x.clone().qr();
    let r = qr.r();
    let qty = qr.q().transpose() * y;
    let beta =
        r.solve_upper_triangular(&qty).ok_or_else(|| StatsError::Numeric("singular triangular factor".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| StatsError::Numeric("singular triangular factor".into()))?;
    let bread = &r_inv * r_inv.transpose();

    let resid = y - x * &beta;
    let mut xe = x.clone();
    for i in 0..n {
        xe.row_mut(i).scale_mut(resid[i]);
    }
    let meat = xe.transpose() * &xe;
    let cov = sandwich(&bread, &meat, n, robust);
    let se: Vec<f64> = (0..k).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let coef: Vec<f64> = beta.iter().copied().collect();
    let (t, p) = inference(&coef, &se, Reference::StudentT((n - k) as f64));

    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ssr = resid.norm_squared();
    let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { f64::NAN };

    Ok(FitResult {
        family: Family::Ols,
        terms: design.names.clone(),
        coefficients: coef,
        robust_se: se,
        z_or_t: t,
        p_values: p,
        r_squared,
        n_obs: n,
        converged: true,
        iterations: 1,
        log_likelihood: None,
        null_log_likelihood: None,
        covariance: cov,
        se_kind: robust,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(rows: &[(f64, f64)]) -> DesignMatrix {
        let x = DMatrix::from_fn(rows.len(), 2, |i, j| if j == 0 { 1.0 } else { rows[i].0 });
        let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
        DesignMatrix::new(vec!["const".into(), "x".into()], x, y)
    }

    #[test]
    fn exact_line() {
        let f = fit_ols(&design(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]), RobustSe::Hc1).unwrap();
        assert!((f.coef("x").unwrap() - 1.0).abs() < 1e-12);
        assert!(f.coef("const").unwrap().abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_points_by_hand() {
        // x = 0,1,2,3; y = 1,3,2,5. Sxx = 5, Sxy = 5.5, slope 1.1, intercept
        // ybar - 1.1 * xbar = 2.75 - 1.65 = 1.1.
        let f = fit_ols(&design(&[(0.0, 1.0), (1.0, 3.0), (2.0, 2.0), (3.0, 5.0)]), RobustSe::Hc0).unwrap();
        assert!((f.coef("x").unwrap() - 1.1).abs() < 1e-10);
        assert!((f.coef("const").unwrap() - 1.1).abs() < 1e-10);
        // residuals -0.1, 0.8, -1.3, 0.6: SSR 2.7, SST 8.75
        assert!((f.r_squared - (1.0 - 2.7 / 8.75)).abs() < 1e-10);
    }

    #[test]
    fn hc1_scales_hc0() {
        let d = design(&[(0.0, 1.0), (1.0, 3.0), (2.0, 2.0), (3.0, 5.0), (4.0, 4.0)]);
        let a = fit_ols(&d, RobustSe::Hc0).unwrap();
        let b = fit_ols(&d, RobustSe::Hc1).unwrap();
        for j in 0..2 {
            let ratio = b.covariance[(j, j)] / a.covariance[(j, j)];
            assert!((ratio - 5.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dependent_columns_detected() {
        let x = DMatrix::from_row_slice(4, 3, &[1.0, 0.0, 2.0, 1.0, 1.0, 2.0, 1.0, 2.0, 2.0, 1.0, 3.0, 2.0]);
        assert_eq!(linearly_dependent_columns(&x), vec![2]);
        let d = DesignMatrix::new(vec!["const".into(), "a".into(), "b".into()], x, DVector::zeros(4));
        assert_eq!(fit_ols(&d, RobustSe::Hc1).unwrap_err(), StatsError::RankDeficient(vec!["b".into()]));
    }

    #[test]
    fn non_finite_rejected() {
        let d = design(&[(0.0, 1.0), (1.0, f64::NAN), (2.0, 2.0)]);
        assert!(matches!(fit_ols(&d, RobustSe::Hc1), Err(StatsError::Numeric(_))));
    }
}
