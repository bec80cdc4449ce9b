//! Descriptives, two-group rank tests and fixed-effects regressions.
//!
//! Models are described by a [`ModelSpec`], turned into a [`DesignMatrix`]
//! from a column store ([`Frame`]) and fitted by [`fit_ols`],
//! [`fit_logistic`] or [`fit_poisson`]. All fits report sandwich (HC0/HC1)
//! standard errors.

mod describe;
mod design;
mod fit;
mod frame;
mod glm;
mod group;
mod margins;
mod ols;
mod report;

use thiserror::Error;

pub use describe::{describe, describe_frame, percentile, Descriptives, DESCRIBE_HEADER};
pub use design::{build_design, DesignMatrix, Family, ModelSpec, RobustSe, Term, Transform, INTERCEPT};
pub use fit::FitResult;
pub use frame::{score_column, Column, Frame};
pub use glm::{fit_glm, fit_logistic, fit_poisson, log_likelihood, score, GlmOptions};
pub use group::{auc_effect, mann_whitney_u, mwu_exact_p, mwu_normal_p, GroupTestResult};
pub use margins::{marginal_means, standardize, MarginalMean};
pub use ols::{fit_ols, linearly_dependent_columns};
pub use report::{
    coefficient_csv, poisson_models, primary_models, regression_table, robustness_models, significance_stars,
    ReportColumn, COEFFICIENT_ROWS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("unknown term {0:?}")]
    UnknownTerm(String),
    #[error("column {column:?}: {message}")]
    BadColumn { column: String, message: String },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("design matrix is rank deficient; collinear columns: {0:?}")]
    RankDeficient(Vec<String>),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("separation detected: coefficient {term:?} diverged to {value}")]
    Separation { term: String, value: f64 },
    #[error("no complete cases")]
    NoObservations,
}
