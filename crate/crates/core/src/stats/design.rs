use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ols::linearly_dependent_columns;
use super::{Frame, StatsError};

/// Name of the intercept column.
pub const INTERCEPT: &str = "const";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ols,
    Logistic,
    Poisson,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ols => "ols",
            Self::Logistic => "logistic",
            Self::Poisson => "poisson",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RobustSe {
    Hc0,
    #[default]
    Hc1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    Identity,
    Log1p,
    Zscore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub column: String,
    #[serde(default)]
    pub transform: Transform,
}

impl Term {
    pub fn new(column: impl Into<String>, transform: Transform) -> Self {
        Self { column: column.into(), transform }
    }

    /// Design-matrix column name: the column itself, or `log1p(col)` / `z(col)`.
    pub fn name(&self) -> String {
        match self.transform {
            Transform::Identity => self.column.clone(),
            Transform::Log1p => format!("log1p({})", self.column),
            Transform::Zscore => format!("z({})", self.column),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub outcome: String,
    pub family: Family,
    pub terms: Vec<Term>,
    #[serde(default)]
    pub fixed_effects: Vec<String>,
    #[serde(default)]
    pub robust_se: RobustSe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub names: Vec<String>,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    /// Frame row of each design row.
    pub rows: Vec<usize>,
}

impl DesignMatrix {
    pub fn new(names: Vec<String>, x: DMatrix<f64>, y: DVector<f64>) -> Self {
        assert_eq!(names.len(), x.ncols());
        assert_eq!(y.len(), x.nrows());
        let rows = (0..x.nrows()).collect();
        Self { names, x, y, rows }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn nobs(&self) -> usize {
        self.x.nrows()
    }
}

fn bad(column: &str, message: impl Into<String>) -> StatsError {
    StatsError::BadColumn { column: column.into(), message: message.into() }
}

/// Intercept, transformed numeric terms and fixed-effect dummies over the
/// complete cases of `frame`. Each fixed effect drops its lexicographically
/// smallest level; dummies are named `column=level`.
pub fn build_design(frame: &Frame, spec: &ModelSpec) -> Result<DesignMatrix, StatsError> {
    if spec.terms.iter().any(|t| t.column == spec.outcome) {
        return Err(StatsError::InvalidModel(format!("outcome {:?} is also a term", spec.outcome)));
    }
    let outcome = frame.numeric(&spec.outcome)?;
    let terms: Vec<&[Option<f64>]> = spec.terms.iter().map(|t| frame.numeric(&t.column)).collect::<Result<_, _>>()?;
    let fes = spec
        .fixed_effects
        .iter()
        .map(|c| frame.column(c).ok_or_else(|| StatsError::UnknownColumn(c.clone())))
        .collect::<Result<Vec<_>, _>>()?;

    let rows: Vec<usize> = (0..frame.nrows())
        .filter(|&i| {
            outcome[i].is_some() && terms.iter().all(|t| t[i].is_some()) && fes.iter().all(|c| !c.is_missing(i))
        })
        .collect();
    if rows.is_empty() {
        return Err(StatsError::NoObservations);
    }
    for (name, col) in
        std::iter::once((&spec.outcome, outcome)).chain(spec.terms.iter().map(|t| &t.column).zip(terms.iter().copied()))
    {
        if rows.iter().any(|&i| !col[i].unwrap().is_finite()) {
            return Err(StatsError::Numeric(format!("non-finite value in {name:?}")));
        }
    }

    let n = rows.len();
    let mut names = vec![INTERCEPT.to_string()];
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; n]];
    for (term, col) in spec.terms.iter().zip(&terms) {
        let raw: Vec<f64> = rows.iter().map(|&i| col[i].unwrap()).collect();
        let values = match term.transform {
            Transform::Identity => raw,
            Transform::Log1p => {
                if raw.iter().any(|&v| v <= -1.0) {
                    return Err(bad(&term.column, "log1p needs values above -1"));
                }
                raw.iter().map(|v| v.ln_1p()).collect()
            }
            Transform::Zscore => {
                let mean = raw.iter().sum::<f64>() / n as f64;
                let sd = (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
                if sd.is_nan() || sd <= 0.0 {
                    return Err(bad(&term.column, "zero variance, cannot standardise"));
                }
                raw.iter().map(|v| (v - mean) / sd).collect()
            }
        };
        names.push(term.name());
        cols.push(values);
    }
    for (fe_name, col) in spec.fixed_effects.iter().zip(&fes) {
        let labels: Vec<String> = rows.iter().map(|&i| col.label(i).unwrap()).collect();
        let levels: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
        for level in levels.into_iter().skip(1) {
            names.push(format!("{fe_name}={level}"));
            cols.push(labels.iter().map(|l| f64::from(u8::from(l == level))).collect());
        }
    }

    let x = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    let y = DVector::from_iterator(n, rows.iter().map(|&i| outcome[i].unwrap()));
    let dependent = linearly_dependent_columns(&x);
    if !dependent.is_empty() {
        return Err(StatsError::RankDeficient(dependent.into_iter().map(|j| names[j].clone()).collect()));
    }
    Ok(DesignMatrix { names, x, y, rows })
}
