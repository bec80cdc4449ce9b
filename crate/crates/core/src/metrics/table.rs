use std::io::{Read, Write};

use super::{MetricsError, WindowSpec};

pub const SCORE_HEADER: [&str; 7] =
    ["id", "span", "distinctiveness", "novelty_count", "novelty_binary", "resonance", "resonance_available"];

#[derive(Debug, Clone, PartialEq)]
pub struct InnovationScores {
    pub record_id: String,
    pub distinctiveness: f64,
    pub novelty_count: u32,
    pub novelty_binary: bool,
    pub resonance: Option<f64>,
    pub window: WindowSpec,
}

impl InnovationScores {
    pub fn span(&self) -> u32 {
        self.window.span_years
    }
}

/// Scores keyed by `(record_id, span)`, sorted by that key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    rows: Vec<InnovationScores>,
    unscoreable: Vec<(String, u32)>,
}

impl ScoreTable {
    pub fn new(mut rows: Vec<InnovationScores>, mut unscoreable: Vec<(String, u32)>) -> Self {
        rows.sort_by(|a, b| (&a.record_id, a.span()).cmp(&(&b.record_id, b.span())));
        rows.dedup_by(|a, b| a.record_id == b.record_id && a.span() == b.span());
        unscoreable.sort();
        unscoreable.dedup();
        Self { rows, unscoreable }
    }

    pub fn rows(&self) -> &[InnovationScores] {
        &self.rows
    }

    /// `(record_id, span)` pairs whose past window was empty.
    pub fn unscoreable(&self) -> &[(String, u32)] {
        &self.unscoreable
    }

    pub fn get(&self, id: &str, span: u32) -> Option<&InnovationScores> {
        self.rows.binary_search_by(|r| (r.record_id.as_str(), r.span()).cmp(&(id, span))).ok().map(|i| &self.rows[i])
    }

    pub fn spans(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.rows.iter().map(|r| r.span()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// CSV with fixed 6-decimal reals and `NA` for missing resonance.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), MetricsError> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| MetricsError::Table(e.to_string());
        w.write_record(SCORE_HEADER).map_err(err)?;
        for r in &self.rows {
            let (res, avail) = match r.resonance {
                Some(v) => (format!("{v:.6}"), "1"),
                None => ("NA".to_string(), "0"),
            };
            w.write_record([
                r.record_id.as_str(),
                &r.span().to_string(),
                &format!("{:.6}", r.distinctiveness),
                &r.novelty_count.to_string(),
                if r.novelty_binary { "1" } else { "0" },
                &res,
                avail,
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| MetricsError::Table(e.to_string()))
    }

    /// Reads the CSV written by [`ScoreTable::write_csv`]. All windows are
    /// tagged with the filtered comparison set.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, MetricsError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers().map_err(|e| MetricsError::Table(e.to_string()))?;
        if headers.iter().collect::<Vec<_>>() != SCORE_HEADER {
            return Err(MetricsError::Table(format!("unexpected header {headers:?}")));
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| MetricsError::Table(e.to_string()))?;
            let bad = |what: &str| MetricsError::Table(format!("row {}: bad {what}", i + 1));
            let span: u32 = rec[1].parse().map_err(|_| bad("span"))?;
            let resonance = match &rec[5] {
                "NA" => None,
                s => Some(s.parse().map_err(|_| bad("resonance"))?),
            };
            rows.push(InnovationScores {
                record_id: rec[0].to_string(),
                distinctiveness: rec[2].parse().map_err(|_| bad("distinctiveness"))?,
                novelty_count: rec[3].parse().map_err(|_| bad("novelty_count"))?,
                novelty_binary: &rec[4] == "1",
                resonance,
                window: WindowSpec::years(span),
            });
        }
        Ok(Self::new(rows, Vec::new()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, span: u32, res: Option<f64>) -> InnovationScores {
        InnovationScores {
            record_id: id.into(),
            distinctiveness: 2.5,
            novelty_count: 1,
            novelty_binary: true,
            resonance: res,
            window: WindowSpec::years(span),
        }
    }

    #[test]
    fn sorted_and_csv_format() {
        let t =
            ScoreTable::new(vec![row("b", 2, None), row("a", 5, Some(-0.125)), row("a", 1, Some(1.0 / 3.0))], vec![]);
        let ids: Vec<_> = t.rows().iter().map(|r| (r.record_id.as_str(), r.span())).collect();
        assert_eq!(ids, vec![("a", 1), ("a", 5), ("b", 2)]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "id,span,distinctiveness,novelty_count,novelty_binary,resonance,resonance_available\n\
             a,1,2.500000,1,1,0.333333,1\n\
             a,5,2.500000,1,1,-0.125000,1\n\
             b,2,2.500000,1,1,NA,0\n"
        );
        let back = ScoreTable::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.get("b", 2).unwrap().resonance, None);
        assert_eq!(back.get("a", 1).unwrap().resonance, Some(0.333333));
    }
}
