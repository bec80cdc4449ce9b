use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use super::registry::FeatureRegistry;
use super::vector::MechanismVector;
use super::CorpusError;

pub const REQUIRED_COLUMNS: [&str; 15] = [
    "id",
    "year",
    "mechanisms",
    "crowdfunded",
    "genre",
    "team_size",
    "debut",
    "complexity",
    "playing_time",
    "min_players",
    "max_players",
    "min_age",
    "is_expansion",
    "is_adult",
    "num_ratings",
];

/// One product in the corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub year: i32,
    pub vector: MechanismVector,
    pub crowdfunded: bool,
    pub genre: String,
    /// Number of listed designers; 0 means none listed.
    pub team_size: u32,
    pub debut: bool,
    pub complexity: f64,
    pub playing_time_minutes: f64,
    pub min_players: u32,
    pub max_players: u32,
    pub min_age: u32,
    pub is_expansion: bool,
    pub is_adult: bool,
    pub num_ratings: u64,
    pub parent_id: Option<String>,
}

impl Record {
    /// Record with neutral defaults for every control, useful for building
    /// fixtures and synthetic corpora.
    pub fn new(id: impl Into<String>, year: i32, vector: MechanismVector) -> Self {
        Self {
            id: id.into(),
            year,
            vector,
            crowdfunded: false,
            genre: "strategy".to_string(),
            team_size: 1,
            debut: false,
            complexity: 2.0,
            playing_time_minutes: 60.0,
            min_players: 2,
            max_players: 4,
            min_age: 10,
            is_expansion: false,
            is_adult: false,
            num_ratings: 10,
            parent_id: None,
        }
    }

    fn validate(&self, row: usize) -> Result<(), CorpusError> {
        let bad = |column: &str, message: String| CorpusError::Field { row, column: column.to_string(), message };
        if !(0.0..=5.0).contains(&self.complexity) {
            return Err(bad("complexity", format!("{} outside [0, 5]", self.complexity)));
        }
        if !(self.playing_time_minutes >= 0.0 && self.playing_time_minutes.is_finite()) {
            return Err(bad("playing_time", format!("{} is not a non-negative number", self.playing_time_minutes)));
        }
        if self.min_age > 25 {
            return Err(bad("min_age", format!("{} outside [0, 25]", self.min_age)));
        }
        if self.max_players > 0 && self.min_players > self.max_players {
            return Err(bad(
                "max_players",
                format!("min_players {} > max_players {}", self.min_players, self.max_players),
            ));
        }
        Ok(())
    }
}

/// Immutable, validated collection of records sharing one registry.
#[derive(Debug, Clone)]
pub struct RecordSet {
    registry: Arc<FeatureRegistry>,
    records: Vec<Record>,
}

impl RecordSet {
    /// Checks vector dimensions and id uniqueness.
    pub fn new(registry: Arc<FeatureRegistry>, records: Vec<Record>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if r.vector.dim() != registry.dimension() {
                return Err(CorpusError::Dimension {
                    id: r.id.clone(),
                    expected: registry.dimension(),
                    found: r.vector.dim(),
                });
            }
            if !seen.insert(r.id.as_str()) {
                return Err(CorpusError::DuplicateId(r.id.clone()));
            }
        }
        Ok(Self { registry, records })
    }

    pub(crate) fn from_parts_unchecked(registry: Arc<FeatureRegistry>, records: Vec<Record>) -> Self {
        Self { registry, records }
    }

    pub fn registry(&self) -> &Arc<FeatureRegistry> {
        &self.registry
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Record> {
        self.records.iter()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.registry.dimension()
    }

    pub fn by_id(&self) -> HashMap<&str, &Record> {
        self.records.iter().map(|r| (r.id.as_str(), r)).collect()
    }

    /// Record indices grouped by publication year.
    pub fn year_index(&self) -> BTreeMap<i32, Vec<usize>> {
        let mut idx: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.records.iter().enumerate() {
            idx.entry(r.year).or_default().push(i);
        }
        idx
    }

    pub fn year_range(&self) -> Option<(i32, i32)> {
        let min = self.records.iter().map(|r| r.year).min()?;
        let max = self.records.iter().map(|r| r.year).max()?;
        Some((min, max))
    }

    /// New set keeping records for which `keep` is true, order preserved.
    pub fn filtered<F: FnMut(&Record) -> bool>(&self, mut keep: F) -> Self {
        Self {
            registry: Arc::clone(&self.registry),
            records: self.records.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a RecordSet {
    type Item = &'a Record;
    type IntoIter = std::slice::Iter<'a, Record>;

    fn into_iter(self) -> Self::IntoIter {
        self.records.iter()
    }
}

struct Columns {
    index: HashMap<String, usize>,
}

impl Columns {
    fn get<'r>(&self, rec: &'r csv::StringRecord, name: &str) -> &'r str {
        self.index.get(name).and_then(|&i| rec.get(i)).map(str::trim).unwrap_or("")
    }
}

fn field_err(row: usize, column: &str, message: impl Into<String>) -> CorpusError {
    CorpusError::Field { row, column: column.to_string(), message: message.into() }
}

fn parse_bool(row: usize, column: &str, s: &str) -> Result<bool, CorpusError> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        "" => Err(field_err(row, column, "missing value")),
        other => Err(field_err(row, column, format!("expected 0 or 1, got {other:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(row: usize, column: &str, s: &str) -> Result<T, CorpusError> {
    if s.is_empty() {
        return Err(field_err(row, column, "missing value"));
    }
    s.parse().map_err(|_| field_err(row, column, format!("cannot parse {s:?}")))
}

fn parse_real(row: usize, column: &str, s: &str) -> Result<f64, CorpusError> {
    let v: f64 = parse_num(row, column, s)?;
    if !v.is_finite() {
        return Err(field_err(row, column, format!("non-finite value {s:?}")));
    }
    Ok(v)
}

/// Reads a corpus CSV. Rows are numbered from 1 (the first data row).
pub fn read_records<R: Read>(reader: R, registry: Arc<FeatureRegistry>) -> Result<RecordSet, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let headers = rdr.headers().map_err(CorpusError::Csv)?.clone();
    let index: HashMap<String, usize> =
        headers.iter().enumerate().map(|(i, h)| (h.trim().trim_start_matches('\u{feff}').to_string(), i)).collect();
    let missing: Vec<String> =
        REQUIRED_COLUMNS.iter().filter(|c| !index.contains_key(**c)).map(|c| c.to_string()).collect();
    if !missing.is_empty() {
        return Err(CorpusError::Schema { missing });
    }
    let cols = Columns { index };
    let has_parent = cols.index.contains_key("parent_id");

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(CorpusError::Csv)?;
        let id = cols.get(&rec, "id");
        if id.is_empty() {
            return Err(field_err(row, "id", "missing value"));
        }
        if !seen.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId(id.to_string()));
        }
        let mech_field = cols.get(&rec, "mechanisms");
        let names = mech_field.split(';').map(str::trim).filter(|s| !s.is_empty());
        let vector =
            registry.encode(names).map_err(|name| CorpusError::UnknownFeature { row, name: name.to_string() })?;
        let genre = cols.get(&rec, "genre");
        if genre.is_empty() {
            return Err(field_err(row, "genre", "missing value"));
        }
        let parent_id = if has_parent {
            Some(cols.get(&rec, "parent_id")).filter(|s| !s.is_empty()).map(str::to_string)
        } else {
            None
        };
        let record = Record {
            id: id.to_string(),
            year: parse_num(row, "year", cols.get(&rec, "year"))?,
            vector,
            crowdfunded: parse_bool(row, "crowdfunded", cols.get(&rec, "crowdfunded"))?,
            genre: genre.to_string(),
            team_size: parse_num(row, "team_size", cols.get(&rec, "team_size"))?,
            debut: parse_bool(row, "debut", cols.get(&rec, "debut"))?,
            complexity: parse_real(row, "complexity", cols.get(&rec, "complexity"))?,
            playing_time_minutes: parse_real(row, "playing_time", cols.get(&rec, "playing_time"))?,
            min_players: parse_num(row, "min_players", cols.get(&rec, "min_players"))?,
            max_players: parse_num(row, "max_players", cols.get(&rec, "max_players"))?,
            min_age: parse_num(row, "min_age", cols.get(&rec, "min_age"))?,
            is_expansion: parse_bool(row, "is_expansion", cols.get(&rec, "is_expansion"))?,
            is_adult: parse_bool(row, "is_adult", cols.get(&rec, "is_adult"))?,
            num_ratings: parse_num(row, "num_ratings", cols.get(&rec, "num_ratings"))?,
            parent_id,
        };
        record.validate(row)?;
        records.push(record);
    }
    Ok(RecordSet::from_parts_unchecked(registry, records))
}

pub fn parse_records(path: impl AsRef<Path>, registry: Arc<FeatureRegistry>) -> Result<RecordSet, CorpusError> {
    let path = path.as_ref();
    let file =
        std::fs::File::open(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    read_records(std::io::BufReader::new(file), registry)
}

fn b(v: bool) -> &'static str {
    if v {
        "1"
    } else {
        "0"
    }
}

/// Writes records in the corpus CSV schema (with `parent_id`). Mechanisms are
/// listed in registry order.
pub fn write_records<W: Write>(writer: W, set: &RecordSet) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = REQUIRED_COLUMNS.to_vec();
    header.push("parent_id");
    w.write_record(&header).map_err(CorpusError::Csv)?;
    let reg = set.registry();
    for r in set {
        let mechs = reg.decode(&r.vector).join(";");
        w.write_record([
            r.id.as_str(),
            &r.year.to_string(),
            &mechs,
            b(r.crowdfunded),
            &r.genre,
            &r.team_size.to_string(),
            b(r.debut),
            &r.complexity.to_string(),
            &r.playing_time_minutes.to_string(),
            &r.min_players.to_string(),
            &r.max_players.to_string(),
            &r.min_age.to_string(),
            b(r.is_expansion),
            b(r.is_adult),
            &r.num_ratings.to_string(),
            r.parent_id.as_deref().unwrap_or(""),
        ])
        .map_err(CorpusError::Csv)?;
    }
    w.flush().map_err(|source| CorpusError::Io { path: "<writer>".into(), source })?;
    Ok(())
}
