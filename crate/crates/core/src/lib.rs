//! Combinatorial innovation metrics over timestamped corpora of binary
//! feature vectors.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`corpus`] loads the feature registry and records and applies the
//!   filtering protocol.
//! * [`metrics`] scores each record's distinctiveness, novelty and resonance
//!   against look-back and look-forward windows.
//! * [`landscape`] builds the network of unique feature vectors, lays it out
//!   and tracks funding-group centroids.
//! * [`stats`] holds descriptives, Mann-Whitney tests and the fixed-effects
//!   OLS / logistic / Poisson models with sandwich standard errors.
//! * [`synth`] generates synthetic corpora with a controllable novelty gap
//!   between funding groups.

pub mod corpus;
pub mod landscape;
pub mod metrics;
pub mod stats;
pub mod synth;

pub use corpus::{FeatureRegistry, MechanismVector, Record, RecordSet};
