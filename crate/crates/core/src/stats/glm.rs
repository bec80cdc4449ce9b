use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

use super::fit::{inference, sandwich, weighted_gram, Reference};
use super::ols::linearly_dependent_columns;
use super::{DesignMatrix, Family, FitResult, RobustSe, StatsError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlmOptions {
    pub max_iter: usize,
    /// Converged when every score component is below this in magnitude...
    pub score_tol: f64,
    /// ...or when the relative log-likelihood change falls below this.
    pub ll_rel_tol: f64,
    /// Any coefficient beyond this magnitude is treated as separation.
    pub separation_bound: f64,
}

impl Default for GlmOptions {
    fn default() -> Self {
        Self { max_iter: 100, score_tol: 1e-8, ll_rel_tol: 1e-10, separation_bound: 30.0 }
    }
}

fn softplus(eta: f64) -> f64 {
    eta.max(0.0) + (-eta.abs()).exp().ln_1p()
}

fn inverse_link(family: Family, eta: f64) -> f64 {
    match family {
        Family::Logistic => 1.0 / (1.0 + (-eta).exp()),
        Family::Poisson => eta.exp(),
        Family::Ols => eta,
    }
}

fn unit_ll(family: Family, y: f64, eta: f64) -> f64 {
    match family {
        Family::Logistic => y * eta - softplus(eta),
        Family::Poisson => y * eta - eta.exp() - ln_gamma(y + 1.0),
        Family::Ols => -(y - eta).powi(2) / 2.0,
    }
}

/// Log-likelihood of a canonical-link GLM at `beta`. For Poisson the
/// `-ln(y!)` term is included.
pub fn log_likelihood(family: Family, x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    eta.iter().zip(y.iter()).map(|(&e, &yi)| unit_ll(family, yi, e)).sum()
}

/// Gradient of [`log_likelihood`]: `Xᵀ (y - μ)`.
pub fn score(family: Family, x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> DVector<f64> {
    let eta = x * beta;
    let resid = DVector::from_iterator(y.len(), y.iter().zip(eta.iter()).map(|(&yi, &e)| yi - inverse_link(family, e)));
    x.transpose() * resid
}

fn null_log_likelihood(family: Family, y: &DVector<f64>) -> f64 {
    let mean = y.mean();
    match family {
        Family::Logistic => {
            if mean <= 0.0 || mean >= 1.0 {
                return 0.0;
            }
            y.iter().map(|&v| v * mean.ln() + (1.0 - v) * (1.0 - mean).ln()).sum()
        }
        Family::Poisson => y
            .iter()
            .map(|&v| {
                let term = if v > 0.0 { v * mean.ln() } else { 0.0 };
                term - mean - ln_gamma(v + 1.0)
            })
            .sum(),
        Family::Ols => unreachable!("no likelihood null model for OLS"),
    }
}

fn check_outcome(family: Family, y: &DVector<f64>) -> Result<(), StatsError> {
    let ok = match family {
        Family::Logistic => y.iter().all(|&v| v == 0.0 || v == 1.0),
        Family::Poisson => y.iter().all(|&v| v >= 0.0 && v.fract() == 0.0),
        Family::Ols => true,
    };
    if ok {
        Ok(())
    } else {
        Err(StatsError::InvalidModel(format!("outcome values are not valid for {}", family.as_str())))
    }
}

/// Variance-function weights, floored so that the Gram matrix stays
/// invertible when fitted probabilities saturate.
fn weights(family: Family, mu: &[f64]) -> Vec<f64> {
    mu.iter()
        .map(|&m| {
            let w = match family {
                Family::Logistic => m * (1.0 - m),
                _ => m,
            };
            w.max(1e-12)
        })
        .collect()
}

fn irls_step(family: Family, x: &DMatrix<f64>, y: &DVector<f64>, eta: &[f64]) -> Result<DVector<f64>, StatsError> {
    let mu: Vec<f64> = eta.iter().map(|&e| inverse_link(family, e)).collect();
    let w = weights(family, &mu);
    let z: Vec<f64> = (0..y.len()).map(|i| eta[i] + (y[i] - mu[i]) / w[i]).collect();
    let gram = weighted_gram(x, &w);
    let rhs = x.transpose() * DVector::from_iterator(z.len(), z.iter().zip(&w).map(|(zi, wi)| zi * wi));
    let chol =
        gram.cholesky().ok_or_else(|| StatsError::Numeric("weighted Gram matrix is not positive definite".into()))?;
    Ok(chol.solve(&rhs))
}

/// Maximum likelihood by iteratively reweighted least squares with
/// step-halving, robust sandwich covariance and McFadden pseudo-R².
pub fn fit_glm(
    design: &DesignMatrix,
    family: Family,
    robust: RobustSe,
    opts: &GlmOptions,
) -> Result<FitResult, StatsError> {
    if family == Family::Ols {
        return super::fit_ols(design, robust);
    }
    let x = &design.x;
    let y = &design.y;
    let (n, k) = x.shape();
    if n <= k {
        return Err(StatsError::InvalidModel(format!("{n} observations for {k} columns")));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(StatsError::Numeric("non-finite value in design".into()));
    }
    check_outcome(family, y)?;
    let dependent = linearly_dependent_columns(x);
    if !dependent.is_empty() {
        return Err(StatsError::RankDeficient(dependent.into_iter().map(|j| design.names[j].clone()).collect()));
    }

    let eta0: Vec<f64> = y
        .iter()
        .map(|&v| match family {
            Family::Logistic => {
                let m = (v + 0.5) / 2.0;
                (m / (1.0 - m)).ln()
            }
            _ => (v + 0.1).ln(),
        })
        .collect();
    let mut beta = irls_step(family, x, y, &eta0)?;
    let mut ll = log_likelihood(family, x, y, &beta);
    let mut converged = false;
    let mut iterations = 1;
    while iterations < opts.max_iter {
        if let Some((j, &b)) = beta.iter().enumerate().find(|(_, b)| b.abs() > opts.separation_bound) {
            return Err(StatsError::Separation { term: design.names[j].clone(), value: b });
        }
        let g = score(family, x, y, &beta);
        if g.amax() < opts.score_tol {
            converged = true;
            break;
        }
        let eta: Vec<f64> = (x * &beta).iter().copied().collect();
        let proposal = irls_step(family, x, y, &eta)?;
        let mut step = &proposal - &beta;
        let mut next = &beta + &step;
        let mut ll_next = log_likelihood(family, x, y, &next);
        let mut halvings = 0;
        while !(ll_next.is_finite() && ll_next >= ll - 1e-12 * ll.abs()) && halvings < 30 {
            step *= 0.5;
            next = &beta + &step;
            ll_next = log_likelihood(family, x, y, &next);
            halvings += 1;
        }
        iterations += 1;
        let change = (ll_next - ll).abs() / ll.abs().max(f64::MIN_POSITIVE);
        beta = next;
        ll = ll_next;
        if change < opts.ll_rel_tol {
            converged = true;
            break;
        }
    }
    if let Some((j, &b)) = beta.iter().enumerate().find(|(_, b)| b.abs() > opts.separation_bound) {
        return Err(StatsError::Separation { term: design.names[j].clone(), value: b });
    }

    let eta = x * &beta;
    let mu: Vec<f64> = eta.iter().map(|&e| inverse_link(family, e)).collect();
    let info = weighted_gram(x, &weights(family, &mu));
    let bread = info.try_inverse().ok_or_else(|| StatsError::Numeric("information matrix is singular".into()))?;
    let sq_resid: Vec<f64> = (0..n).map(|i| (y[i] - mu[i]).powi(2)).collect();
    let meat = weighted_gram(x, &sq_resid);
    let cov = sandwich(&bread, &meat, n, robust);
    let se: Vec<f64> = (0..k).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let coef: Vec<f64> = beta.iter().copied().collect();
    let (z, p) = inference(&coef, &se, Reference::Normal);
    let ll_null = null_log_likelihood(family, y);
    let r_squared = if ll_null == 0.0 { 0.0 } else { 1.0 - ll / ll_null };

    Ok(FitResult {
        family,
        terms: design.names.clone(),
        coefficients: coef,
        robust_se: se,
        z_or_t: z,
        p_values: p,
        r_squared,
        n_obs: n,
        converged,
        iterations,
        log_likelihood: Some(ll),
        null_log_likelihood: Some(ll_null),
        covariance: cov,
        se_kind: robust,
    })
}

pub fn fit_logistic(design: &DesignMatrix, robust: RobustSe) -> Result<FitResult, StatsError> {
    fit_glm(design, Family::Logistic, robust, &GlmOptions::default())
}

pub fn fit_poisson(design: &DesignMatrix, robust: RobustSe) -> Result<FitResult, StatsError> {
    fit_glm(design, Family::Poisson, robust, &GlmOptions::default())
}
