use std::collections::BTreeMap;

use super::StatsError;
use crate::corpus::RecordSet;
use crate::metrics::ScoreTable;

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Self::Numeric(v) => v.len(),
            Self::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            Self::Numeric(v) => v[row].is_none(),
            Self::Categorical(v) => v[row].is_none(),
        }
    }

    /// Value as a category label; numeric values are formatted with `{}`.
    pub fn label(&self, row: usize) -> Option<String> {
        match self {
            Self::Numeric(v) => v[row].map(|x| format!("{x}")),
            Self::Categorical(v) => v[row].clone(),
        }
    }
}

/// Name of a score column, e.g. `distinctiveness_2y`.
pub fn score_column(metric: &str, span: u32) -> String {
    format!("{metric}_{span}y")
}

/// Column store with one row per record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Frame {
    ids: Vec<String>,
    columns: BTreeMap<String, Column>,
}

impl Frame {
    pub fn new(ids: Vec<String>) -> Self {
        Self { ids, columns: BTreeMap::new() }
    }

    pub fn nrows(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    /// Adds or replaces a column.
    pub fn insert(&mut self, name: impl Into<String>, column: Column) -> Result<(), StatsError> {
        let name = name.into();
        if column.len() != self.nrows() {
            return Err(StatsError::BadColumn {
                column: name,
                message: format!("has {} rows, frame has {}", column.len(), self.nrows()),
            });
        }
        self.columns.insert(name, column);
        Ok(())
    }

    pub fn numeric(&self, name: &str) -> Result<&[Option<f64>], StatsError> {
        match self.columns.get(name) {
            Some(Column::Numeric(v)) => Ok(v),
            Some(Column::Categorical(_)) => {
                Err(StatsError::BadColumn { column: name.into(), message: "expected a numeric column".into() })
            }
            None => Err(StatsError::UnknownColumn(name.into())),
        }
    }

    /// Record attributes plus, for each span in `scores`, the columns
    /// `distinctiveness_{s}y`, `novelty_count_{s}y`, `novelty_binary_{s}y` and
    /// `resonance_{s}y`. Scores a record lacks are missing.
    pub fn from_records(records: &RecordSet, scores: Option<&ScoreTable>) -> Self {
        let rs = records.records();
        let mut f = Frame::new(rs.iter().map(|r| r.id.clone()).collect());
        let num =
            |get: &dyn Fn(&crate::corpus::Record) -> f64| Column::Numeric(rs.iter().map(|r| Some(get(r))).collect());
        let b = |v: bool| f64::from(u8::from(v));
        let cols = [
            ("crowdfunded", num(&|r| b(r.crowdfunded))),
            ("year", num(&|r| r.year as f64)),
            ("team_size", num(&|r| r.team_size as f64)),
            ("debut", num(&|r| b(r.debut))),
            ("complexity", num(&|r| r.complexity)),
            ("playing_time", num(&|r| r.playing_time_minutes)),
            ("min_players", num(&|r| r.min_players as f64)),
            ("max_players", num(&|r| r.max_players as f64)),
            ("min_age", num(&|r| r.min_age as f64)),
            ("is_expansion", num(&|r| b(r.is_expansion))),
            ("is_adult", num(&|r| b(r.is_adult))),
            ("num_ratings", num(&|r| r.num_ratings as f64)),
            ("num_mechanisms", num(&|r| r.vector.popcount() as f64)),
            ("genre", Column::Categorical(rs.iter().map(|r| Some(r.genre.clone())).collect())),
        ];
        for (name, col) in cols {
            f.columns.insert(name.to_string(), col);
        }
        if let Some(scores) = scores {
            for span in scores.spans() {
                let lookup = |get: &dyn Fn(&crate::metrics::InnovationScores) -> Option<f64>| {
                    Column::Numeric(rs.iter().map(|r| scores.get(&r.id, span).and_then(get)).collect())
                };
                f.columns.insert(score_column("distinctiveness", span), lookup(&|s| Some(s.distinctiveness)));
                f.columns.insert(score_column("novelty_count", span), lookup(&|s| Some(s.novelty_count as f64)));
                f.columns.insert(
                    score_column("novelty_binary", span),
                    lookup(&|s| Some(f64::from(u8::from(s.novelty_binary)))),
                );
                f.columns.insert(score_column("resonance", span), lookup(&|s| s.resonance));
            }
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_checks_length() {
        let mut f = Frame::new(vec!["a".into(), "b".into()]);
        assert!(f.insert("x", Column::Numeric(vec![Some(1.0)])).is_err());
        f.insert("x", Column::Numeric(vec![Some(1.0), None])).unwrap();
        assert!(f.column("x").unwrap().is_missing(1));
        assert_eq!(f.numeric("y"), Err(StatsError::UnknownColumn("y".into())));
    }

    #[test]
    fn numeric_labels() {
        let c = Column::Numeric(vec![Some(2011.0), Some(0.5)]);
        assert_eq!(c.label(0).as_deref(), Some("2011"));
        assert_eq!(c.label(1).as_deref(), Some("0.5"));
    }
}
