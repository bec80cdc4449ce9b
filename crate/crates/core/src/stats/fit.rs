use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::{Family, RobustSe, StatsError};

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub family: Family,
    pub terms: Vec<String>,
    pub coefficients: Vec<f64>,
    pub robust_se: Vec<f64>,
    /// t statistics for OLS, z statistics for the GLMs.
    pub z_or_t: Vec<f64>,
    /// Two-sided.
    pub p_values: Vec<f64>,
    /// Classical R² for OLS, McFadden pseudo-R² for the GLMs.
    pub r_squared: f64,
    pub n_obs: usize,
    pub converged: bool,
    pub iterations: usize,
    pub log_likelihood: Option<f64>,
    pub null_log_likelihood: Option<f64>,
    /// Robust covariance of the coefficients.
    pub covariance: DMatrix<f64>,
    pub se_kind: RobustSe,
}

impl FitResult {
    pub fn index(&self, term: &str) -> Result<usize, StatsError> {
        self.terms.iter().position(|t| t == term).ok_or_else(|| StatsError::UnknownTerm(term.into()))
    }

    pub fn coef(&self, term: &str) -> Result<f64, StatsError> {
        Ok(self.coefficients[self.index(term)?])
    }

    pub fn se(&self, term: &str) -> Result<f64, StatsError> {
        Ok(self.robust_se[self.index(term)?])
    }

    pub fn p_value(&self, term: &str) -> Result<f64, StatsError> {
        Ok(self.p_values[self.index(term)?])
    }

    pub fn stat(&self, term: &str) -> Result<f64, StatsError> {
        Ok(self.z_or_t[self.index(term)?])
    }
}

/// `bread · meat · bread`, scaled by `n / (n - k)` for HC1.
pub(crate) fn sandwich(bread: &DMatrix<f64>, meat: &DMatrix<f64>, n: usize, kind: RobustSe) -> DMatrix<f64> {
    let k = bread.nrows();
    let mut cov = bread * meat * bread;
    if kind == RobustSe::Hc1 {
        cov *= n as f64 / (n - k) as f64;
    }
    // symmetrise against rounding
    let t = cov.transpose();
    (cov + t) * 0.5
}

/// `Xᵀ diag(w) X` for per-row weights `w`.
pub(crate) fn weighted_gram(x: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let mut xw = x.clone();
    for (i, &wi) in w.iter().enumerate() {
        xw.row_mut(i).scale_mut(wi);
    }
    x.transpose() * xw
}

pub(crate) enum Reference {
    StudentT(f64),
    Normal,
}

/// Test statistics and two-sided p-values for each coefficient.
pub(crate) fn inference(coef: &[f64], se: &[f64], reference: Reference) -> (Vec<f64>, Vec<f64>) {
    let sf = |z: f64| match reference {
        Reference::StudentT(df) => StudentsT::new(0.0, 1.0, df).expect("positive df").sf(z),
        Reference::Normal => Normal::new(0.0, 1.0).expect("standard normal").sf(z),
    };
    coef.iter()
        .zip(se)
        .map(|(&b, &s)| {
            let z = if s > 0.0 {
                b / s
            } else if b == 0.0 {
                0.0
            } else {
                b.signum() * f64::INFINITY
            };
            (z, (2.0 * sf(z.abs())).min(1.0))
        })
        .unzip()
}
