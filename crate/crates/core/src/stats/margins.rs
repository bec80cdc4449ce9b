use nalgebra::DVector;

use super::{DesignMatrix, Family, FitResult, StatsError};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalMean {
    pub level: f64,
    pub estimate: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
}

impl MarginalMean {
    /// Re-expresses the estimate and interval in units of `sd` around `mean`.
    pub fn standardized(&self, mean: f64, sd: f64) -> Self {
        Self {
            level: self.level,
            estimate: (self.estimate - mean) / sd,
            se: self.se / sd,
            lower: (self.lower - mean) / sd,
            upper: (self.upper - mean) / sd,
        }
    }
}

/// Mean and sample standard deviation, for standardised display.
pub fn standardize(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    (mean, sd)
}

/// Average adjusted predictions: for each level, the focal column is set to
/// that level in every row and the predicted outcome is averaged. Intervals
/// use the delta method with the fit's robust covariance.
pub fn marginal_means(
    fit: &FitResult,
    design: &DesignMatrix,
    focal: &str,
    levels: &[f64],
) -> Result<Vec<MarginalMean>, StatsError> {
    let j = fit.index(focal)?;
    if design.column_index(focal) != Some(j) || design.names != fit.terms {
        return Err(StatsError::UnknownTerm(focal.into()));
    }
    if design.x.column(j).iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(StatsError::BadColumn { column: focal.into(), message: "focal column is not binary".into() });
    }
    let beta = DVector::from_column_slice(&fit.coefficients);
    let n = design.nobs();
    let k = beta.len();
    let mut out = Vec::with_capacity(levels.len());
    for &level in levels {
        let mut x = design.x.clone();
        x.column_mut(j).fill(level);
        let eta = &x * &beta;
        let mut estimate = 0.0;
        let mut grad = DVector::zeros(k);
        for i in 0..n {
            let (mu, dmu) = match fit.family {
                Family::Ols => (eta[i], 1.0),
                Family::Logistic => {
                    let p = 1.0 / (1.0 + (-eta[i]).exp());
                    (p, p * (1.0 - p))
                }
                Family::Poisson => {
                    let m = eta[i].exp();
                    (m, m)
                }
            };
            estimate += mu;
            grad += x.row(i).transpose() * dmu;
        }
        estimate /= n as f64;
        grad /= n as f64;
        let se = (grad.transpose() * &fit.covariance * &grad)[(0, 0)].max(0.0).sqrt();
        out.push(MarginalMean { level, estimate, se, lower: estimate - Z_95 * se, upper: estimate + Z_95 * se });
    }
    Ok(out)
}
