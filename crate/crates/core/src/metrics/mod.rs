//! Windowed innovation measures.
//!
//! For a record published in year `y` and a span `s`, the past window holds
//! every comparison record from years `y - s ..= y - 1` and the future window
//! every record from `y + 1 ..= y + s`. Same-year records are never compared.
//!
//! * distinctiveness: mean Hamming distance to the past window
//! * novelty (count): minimum Hamming distance to the past window
//! * novelty (binary): novelty count > 0
//! * resonance: distinctiveness against the past minus distinctiveness against
//!   the future; only defined when every future year is complete
//!
//! The brute-force functions ([`distinctiveness`], [`novelty_count`],
//! [`resonance`]) scan the window directly. [`score_corpus`] uses per-year
//! [`FeatureProfile`]s instead, which gives the same integer distance sums in
//! `O(dimension)` per record.

mod profile;
mod table;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{DimensionError, MechanismVector, Record, RecordSet};

pub use profile::{distinctiveness_fast, FeatureProfile};
pub use table::{InnovationScores, ScoreTable, SCORE_HEADER};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("comparison window for {id:?} ({from}..={to}) is empty")]
    EmptyWindow { id: String, from: i32, to: i32 },
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("span must be at least one year")]
    ZeroSpan,
    #[error("a window requests the raw comparison set but none was supplied")]
    MissingRawCorpus,
    #[error("score table: {0}")]
    Table(String),
}

/// Which corpus supplies the comparison windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ComparisonSet {
    #[default]
    Filtered,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WindowSpec {
    pub span_years: u32,
    #[serde(default)]
    pub comparison_set: ComparisonSet,
}

impl WindowSpec {
    pub const fn years(span_years: u32) -> Self {
        Self { span_years, comparison_set: ComparisonSet::Filtered }
    }

    /// The 1, 2 and 5 year presets.
    pub fn presets() -> [Self; 3] {
        [Self::years(1), Self::years(2), Self::years(5)]
    }

    /// Inclusive year bounds of the window around `focal_year`.
    pub fn bounds(&self, focal_year: i32, direction: Direction) -> (i32, i32) {
        let s = self.span_years as i32;
        match direction {
            Direction::Past => (focal_year - s, focal_year - 1),
            Direction::Future => (focal_year + 1, focal_year + s),
        }
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self::years(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Past,
    Future,
}

/// Records of `records` falling in the window around `focal_year`.
pub fn window_slice(records: &RecordSet, focal_year: i32, span: WindowSpec, direction: Direction) -> Vec<&Record> {
    let (from, to) = span.bounds(focal_year, direction);
    records.iter().filter(|r| r.year >= from && r.year <= to).collect()
}

fn check_span(span: WindowSpec) -> Result<(), MetricsError> {
    if span.span_years == 0 {
        Err(MetricsError::ZeroSpan)
    } else {
        Ok(())
    }
}

fn mean_distance(g: &MechanismVector, window: &[&Record]) -> Result<Option<f64>, MetricsError> {
    if window.is_empty() {
        return Ok(None);
    }
    let mut total: u64 = 0;
    for r in window {
        total += u64::from(g.hamming(&r.vector)?);
    }
    Ok(Some(total as f64 / window.len() as f64))
}

fn past_window<'a>(g: &Record, records: &'a RecordSet, span: WindowSpec) -> Result<Vec<&'a Record>, MetricsError> {
    check_span(span)?;
    let window = window_slice(records, g.year, span, Direction::Past);
    if window.is_empty() {
        let (from, to) = span.bounds(g.year, Direction::Past);
        return Err(MetricsError::EmptyWindow { id: g.id.clone(), from, to });
    }
    Ok(window)
}

/// Mean Hamming distance from `g` to every record in its past window.
pub fn distinctiveness(g: &Record, records: &RecordSet, span: WindowSpec) -> Result<f64, MetricsError> {
    let window = past_window(g, records, span)?;
    Ok(mean_distance(&g.vector, &window)?.expect("window is non-empty"))
}

/// Minimum Hamming distance from `g` to any record in its past window.
pub fn novelty_count(g: &Record, records: &RecordSet, span: WindowSpec) -> Result<u32, MetricsError> {
    let window = past_window(g, records, span)?;
    let mut best = u32::MAX;
    for r in window {
        best = best.min(g.vector.hamming(&r.vector)?);
    }
    Ok(best)
}

pub fn novelty_binary(g: &Record, records: &RecordSet, span: WindowSpec) -> Result<bool, MetricsError> {
    novelty_count(g, records, span).map(|n| n > 0)
}

/// Past-window distinctiveness minus future-window distinctiveness.
///
/// `None` when the future window is empty or reaches past
/// `last_complete_year`.
pub fn resonance(
    g: &Record,
    records: &RecordSet,
    span: WindowSpec,
    last_complete_year: i32,
) -> Result<Option<f64>, MetricsError> {
    let past = distinctiveness(g, records, span)?;
    let (_, last_future) = span.bounds(g.year, Direction::Future);
    if last_future > last_complete_year {
        return Ok(None);
    }
    let future = window_slice(records, g.year, span, Direction::Future);
    Ok(mean_distance(&g.vector, &future)?.map(|f| past - f))
}

/// Per-year aggregates of one comparison corpus.
struct YearBucket {
    profile: FeatureProfile,
    unique: Vec<MechanismVector>,
}

struct WindowIndex<'a> {
    years: BTreeMap<i32, YearBucket>,
    dimension: usize,
    _corpus: &'a RecordSet,
}

impl<'a> WindowIndex<'a> {
    fn new(corpus: &'a RecordSet) -> Self {
        let mut years = BTreeMap::new();
        for (year, idx) in corpus.year_index() {
            let vectors: Vec<&MechanismVector> = idx.iter().map(|&i| &corpus.records()[i].vector).collect();
            let profile = FeatureProfile::from_vectors(corpus.dimension(), (year, year), vectors.iter().copied());
            let mut unique: Vec<MechanismVector> = vectors.into_iter().cloned().collect();
            unique.sort_unstable();
            unique.dedup();
            years.insert(year, YearBucket { profile, unique });
        }
        Self { years, dimension: corpus.dimension(), _corpus: corpus }
    }

    fn profile(&self, from: i32, to: i32) -> FeatureProfile {
        let mut p = FeatureProfile::empty(self.dimension, (from, to));
        for (_, b) in self.years.range(from..=to) {
            p.merge(&b.profile);
        }
        p
    }

    fn min_distance(&self, g: &MechanismVector, from: i32, to: i32) -> Option<u32> {
        let mut best: Option<u32> = None;
        for (_, b) in self.years.range(from..=to) {
            for v in &b.unique {
                let d = g.hamming_unchecked(v);
                if best.is_none_or(|cur| d < cur) {
                    best = Some(d);
                    if d == 0 {
                        return best;
                    }
                }
            }
        }
        best
    }
}

/// Scores every record of `records` for every span.
///
/// Windows with `ComparisonSet::Filtered` compare against `records` itself;
/// `ComparisonSet::Raw` windows compare against `raw`. Records whose past
/// window is empty are listed in [`ScoreTable::unscoreable`] and get no row.
pub fn score_corpus(
    records: &RecordSet,
    raw: Option<&RecordSet>,
    spans: &[WindowSpec],
    last_complete_year: i32,
) -> Result<ScoreTable, MetricsError> {
    for s in spans {
        check_span(*s)?;
    }
    let filtered_index = WindowIndex::new(records);
    let raw_index = match raw {
        Some(r) => {
            if r.dimension() != records.dimension() {
                return Err(DimensionError { left: records.dimension(), right: r.dimension() }.into());
            }
            Some(WindowIndex::new(r))
        }
        None => None,
    };

    // Profiles for every (set, window) pair used, built once and shared.
    let mut profiles: HashMap<(ComparisonSet, i32, i32), FeatureProfile> = HashMap::new();
    let years: Vec<i32> = records.year_index().keys().copied().collect();
    for span in spans {
        let index = match span.comparison_set {
            ComparisonSet::Filtered => &filtered_index,
            ComparisonSet::Raw => raw_index.as_ref().ok_or(MetricsError::MissingRawCorpus)?,
        };
        for &y in &years {
            for dir in [Direction::Past, Direction::Future] {
                let (from, to) = span.bounds(y, dir);
                profiles.entry((span.comparison_set, from, to)).or_insert_with(|| index.profile(from, to));
            }
        }
    }

    type Scored = (Vec<InnovationScores>, Vec<(String, u32)>);
    let per_record: Vec<Scored> = records
        .records()
        .par_iter()
        .map(|g| {
            let mut rows = Vec::with_capacity(spans.len());
            let mut skipped = Vec::new();
            for span in spans {
                let index = match span.comparison_set {
                    ComparisonSet::Filtered => &filtered_index,
                    ComparisonSet::Raw => raw_index.as_ref().expect("checked above"),
                };
                let (pf, pt) = span.bounds(g.year, Direction::Past);
                let past = &profiles[&(span.comparison_set, pf, pt)];
                let Ok(distinct) = distinctiveness_fast(&g.vector, past) else {
                    skipped.push((g.id.clone(), span.span_years));
                    continue;
                };
                let novelty = index.min_distance(&g.vector, pf, pt).expect("non-empty past window has a minimum");
                let (ff, ft) = span.bounds(g.year, Direction::Future);
                let resonance = if ft <= last_complete_year {
                    distinctiveness_fast(&g.vector, &profiles[&(span.comparison_set, ff, ft)])
                        .ok()
                        .map(|future| distinct - future)
                } else {
                    None
                };
                rows.push(InnovationScores {
                    record_id: g.id.clone(),
                    distinctiveness: distinct,
                    novelty_count: novelty,
                    novelty_binary: novelty > 0,
                    resonance,
                    window: *span,
                });
            }
            (rows, skipped)
        })
        .collect();

    let mut rows = Vec::new();
    let mut unscoreable = Vec::new();
    for (r, s) in per_record {
        rows.extend(r);
        unscoreable.extend(s);
    }
    Ok(ScoreTable::new(rows, unscoreable))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::corpus::FeatureRegistry;

    fn set(rows: &[(&str, i32, &str)]) -> RecordSet {
        let dim = rows[0].2.len();
        let reg = Arc::new(FeatureRegistry::new((0..dim).map(|i| format!("f{i}"))).unwrap());
        let records = rows
            .iter()
            .map(|(id, y, bits)| Record::new(*id, *y, MechanismVector::from_bit_str(bits).unwrap()))
            .collect();
        RecordSet::new(reg, records).unwrap()
    }

    fn years(rs: &[&Record]) -> Vec<i32> {
        let mut y: Vec<i32> = rs.iter().map(|r| r.year).collect();
        y.sort();
        y.dedup();
        y
    }

    #[test]
    fn window_bounds() {
        let rs = set(&[("a", 2010, "10"), ("b", 2011, "10"), ("c", 2012, "10"), ("d", 2013, "10"), ("e", 2014, "10")]);
        assert_eq!(years(&window_slice(&rs, 2013, WindowSpec::years(2), Direction::Past)), vec![2011, 2012]);
        assert_eq!(years(&window_slice(&rs, 2013, WindowSpec::years(1), Direction::Future)), vec![2014]);
        assert!(window_slice(&rs, 2010, WindowSpec::years(2), Direction::Past).is_empty());
    }

    #[test]
    fn distinctiveness_examples() {
        let rs = set(&[("p", 2010, "110"), ("g", 2011, "110")]);
        assert_eq!(distinctiveness(&rs.records()[1], &rs, WindowSpec::years(2)).unwrap(), 0.0);

        let rs = set(&[("a", 2010, "011"), ("b", 2010, "101"), ("g", 2011, "110")]);
        assert_eq!(distinctiveness(&rs.records()[2], &rs, WindowSpec::years(2)).unwrap(), 2.0);
    }

    #[test]
    fn empty_window_is_an_error() {
        let rs = set(&[("g", 2010, "110")]);
        let err = distinctiveness(&rs.records()[0], &rs, WindowSpec::years(2)).unwrap_err();
        assert!(matches!(err, MetricsError::EmptyWindow { from: 2008, to: 2009, .. }));
        assert!(novelty_count(&rs.records()[0], &rs, WindowSpec::years(2)).is_err());
    }

    #[test]
    fn novelty_examples() {
        let rs = set(&[("a", 2010, "1000"), ("b", 2010, "0011"), ("g", 2011, "1100")]);
        let g = &rs.records()[2];
        assert_eq!(novelty_count(g, &rs, WindowSpec::years(1)).unwrap(), 1);
        assert!(novelty_binary(g, &rs, WindowSpec::years(1)).unwrap());

        let rs = set(&[("a", 2010, "1100"), ("g", 2011, "1100")]);
        assert_eq!(novelty_count(&rs.records()[1], &rs, WindowSpec::years(1)).unwrap(), 0);
        assert!(!novelty_binary(&rs.records()[1], &rs, WindowSpec::years(1)).unwrap());
    }

    #[test]
    fn resonance_examples() {
        let rs = set(&[("p", 2010, "000"), ("g", 2011, "111"), ("f", 2012, "111")]);
        let g = &rs.records()[1];
        assert_eq!(resonance(g, &rs, WindowSpec::years(1), 2012).unwrap(), Some(3.0));
        // future year not complete
        assert_eq!(resonance(g, &rs, WindowSpec::years(1), 2011).unwrap(), None);
        assert_eq!(resonance(g, &rs, WindowSpec::years(2), 2012).unwrap(), None);

        let rs = set(&[
            ("p", 2010, "011"),
            ("q", 2010, "100"),
            ("g", 2011, "110"),
            ("f1", 2012, "100"),
            ("f2", 2012, "011"),
        ]);
        assert_eq!(resonance(&rs.records()[2], &rs, WindowSpec::years(1), 2012).unwrap(), Some(0.0));
    }

    #[test]
    fn score_corpus_boundaries() {
        let rs = set(&[("a", 2010, "110"), ("b", 2010, "011"), ("c", 2011, "111"), ("d", 2012, "100")]);
        let table = score_corpus(&rs, None, &WindowSpec::presets(), 2012).unwrap();
        // a, b have no predecessors under any span
        assert_eq!(table.unscoreable().len(), 6);
        assert_eq!(table.rows().len(), 6);
        assert!(table.get("a", 2).is_none());
        let c = table.get("c", 1).unwrap();
        assert_eq!(c.distinctiveness, 1.0);
        assert_eq!(c.novelty_count, 1);
        assert_eq!(c.resonance, Some(1.0 - 2.0));
        assert_eq!(table.get("c", 2).unwrap().resonance, None);

        let single = set(&[("a", 2010, "110")]);
        assert!(score_corpus(&single, None, &[WindowSpec::years(2)], 2010).unwrap().rows().is_empty());
    }

    #[test]
    fn raw_comparison_requires_raw_set() {
        let rs = set(&[("a", 2010, "110"), ("c", 2011, "111")]);
        let spec = WindowSpec { span_years: 1, comparison_set: ComparisonSet::Raw };
        assert_eq!(score_corpus(&rs, None, &[spec], 2011).unwrap_err(), MetricsError::MissingRawCorpus);
        let raw = set(&[("a", 2010, "110"), ("z", 2010, "000"), ("c", 2011, "111")]);
        let t = score_corpus(&rs, Some(&raw), &[spec], 2011).unwrap();
        assert_eq!(t.get("c", 1).unwrap().distinctiveness, 2.0);
    }

    #[test]
    fn zero_span_rejected() {
        let rs = set(&[("a", 2010, "110")]);
        assert_eq!(score_corpus(&rs, None, &[WindowSpec::years(0)], 2010).unwrap_err(), MetricsError::ZeroSpan);
    }
}
