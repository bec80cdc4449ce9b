//! Feature registry, record corpus I/O and the filtering protocol that turns
//! a raw corpus into the analysis set.

mod filter;
mod record;
mod registry;
mod vector;

use thiserror::Error;

pub use filter::{apply_filters, FilterConfig, FilterReport, RULES};
pub use record::{parse_records, read_records, write_records, Record, RecordSet, REQUIRED_COLUMNS};
pub use registry::{feature_key, load_registry, Feature, FeatureRegistry};
pub use vector::{hamming, DimensionError, MechanismVector};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("duplicate feature name {0:?}")]
    DuplicateFeature(String),
    #[error("registry has no features")]
    EmptyRegistry,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("row {row}: unknown feature {name:?}")]
    UnknownFeature { row: usize, name: String },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("missing required columns: {}", missing.join(", "))]
    Schema { missing: Vec<String> },
    #[error("row {row}, column {column}: {message}")]
    Field { row: usize, column: String, message: String },
    #[error("record {id:?} has dimension {found}, registry has {expected}")]
    Dimension { id: String, expected: usize, found: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
