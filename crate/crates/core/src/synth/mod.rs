//! Synthetic corpora with a tunable novelty gap between funding groups.
//!
//! Each year's products either get a fresh random feature vector or copy a
//! product from the previous two years and flip a Poisson number of bits.
//! Crowdfunded products flip `novelty_boost` more bits on average. The first
//! two years are burn-in and only draw fresh vectors. Control attributes are
//! drawn independently of the funding flag:
//!
//! | field | distribution |
//! |---|---|
//! | genre | uniform over [`GENRES`] |
//! | team_size | 1 + Poisson(0.45) |
//! | debut | Bernoulli(0.35) |
//! | complexity | Normal(2, 0.9) clamped to [0, 5], two decimals |
//! | playing_time | LogNormal(ln 60, 0.7) rounded, capped at 600 |
//! | min_players | {1, 2, 3, 4} weighted 15/65/15/5 |
//! | max_players | min_players + {0, 1, 2, 3, 4, 6} weighted 10/20/35/15/15/5 |
//! | min_age | {6, 8, 10, 12, 13, 14, 16, 18} weighted 5/15/20/25/10/15/7/3 |
//! | is_expansion | Bernoulli(0.12), no parent |
//! | is_adult | Bernoulli(0.01) |
//! | num_ratings | 10 + floor(LogNormal(4, 1.2)) |

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, LogNormal, Normal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{FeatureRegistry, MechanismVector, Record, RecordSet};

pub const GENRES: [&str; 8] =
    ["strategy", "family", "wargames", "thematic", "party", "abstract/strategy", "childrens", "customizable"];

/// Years at the start of the range in which no product is a copy.
pub const BURN_IN_YEARS: i32 = 2;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub dimension: usize,
    /// Inclusive `(first, last)` year.
    pub years: (i32, i32),
    pub games_per_year: usize,
    /// Crowdfunded probability per year; missing years use
    /// `default_crowdfunded_share`.
    pub crowdfunded_share_by_year: BTreeMap<i32, f64>,
    pub default_crowdfunded_share: f64,
    /// Expected fraction of features set in a fresh vector.
    pub base_mechanism_rate: f64,
    /// Probability that a post-burn-in product copies a recent one.
    pub recombination_rate: f64,
    /// Mean number of bits flipped in a copy.
    pub base_mutation_rate: f64,
    /// Extra mean flipped bits for crowdfunded copies.
    pub novelty_boost: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            dimension: 51,
            years: (2008, 2017),
            games_per_year: 500,
            crowdfunded_share_by_year: BTreeMap::new(),
            default_crowdfunded_share: 0.3,
            base_mechanism_rate: 0.06,
            recombination_rate: 0.7,
            base_mutation_rate: 0.5,
            novelty_boost: 0.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let err = |m: String| Err(SynthError::Config(m));
        if self.dimension < 2 {
            return err(format!("dimension {} is below 2", self.dimension));
        }
        if self.games_per_year < 1 {
            return err("games_per_year must be at least 1".into());
        }
        if self.years.1 < self.years.0 {
            return err(format!("year range {:?} is empty", self.years));
        }
        let probabilities = [
            ("default_crowdfunded_share", self.default_crowdfunded_share),
            ("base_mechanism_rate", self.base_mechanism_rate),
            ("recombination_rate", self.recombination_rate),
        ]
        .into_iter()
        .chain(self.crowdfunded_share_by_year.values().map(|&v| ("crowdfunded_share_by_year", v)));
        for (name, p) in probabilities {
            if !(0.0..=1.0).contains(&p) {
                return err(format!("{name} = {p} is not a probability"));
            }
        }
        for (name, v) in [("base_mutation_rate", self.base_mutation_rate), ("novelty_boost", self.novelty_boost)] {
            if !(v >= 0.0 && v.is_finite()) {
                return err(format!("{name} = {v} must be a finite non-negative number"));
            }
        }
        Ok(())
    }

    pub fn crowdfunded_share(&self, year: i32) -> f64 {
        self.crowdfunded_share_by_year.get(&year).copied().unwrap_or(self.default_crowdfunded_share)
    }

    /// The last year with complete forward coverage is the last simulated year.
    pub fn last_complete_year(&self) -> i32 {
        self.years.1
    }
}

/// The canonical registry when `dimension` matches it, otherwise generic
/// feature names `mechanism_00`, `mechanism_01`, ...
pub fn synth_registry(dimension: usize) -> FeatureRegistry {
    let canonical = FeatureRegistry::canonical();
    if canonical.dimension() == dimension {
        return canonical;
    }
    FeatureRegistry::new((0..dimension).map(|i| format!("mechanism_{i:02}"))).expect("distinct generated names")
}

fn fresh_vector(rng: &mut ChaCha8Rng, dim: usize, rate: f64) -> MechanismVector {
    let k = Binomial::new(dim as u64, rate).expect("validated rate").sample(rng) as usize;
    let k = k.clamp(2, dim);
    MechanismVector::from_indices(dim, index::sample(rng, dim, k).iter())
}

fn mutate(rng: &mut ChaCha8Rng, v: &MechanismVector, mean_flips: f64) -> MechanismVector {
    let dim = v.dim();
    let flips = if mean_flips > 0.0 {
        (Poisson::new(mean_flips).expect("positive mean").sample(rng) as usize).min(dim)
    } else {
        0
    };
    let mut out = v.clone();
    for j in index::sample(rng, dim, flips).iter() {
        out.flip(j);
    }
    out
}

struct Controls {
    min_players: WeightedIndex<u32>,
    extra_players: WeightedIndex<u32>,
    min_age: WeightedIndex<u32>,
    team: Poisson<f64>,
    complexity: Normal<f64>,
    playing_time: LogNormal<f64>,
    ratings: LogNormal<f64>,
}

const MIN_PLAYERS: [u32; 4] = [1, 2, 3, 4];
const EXTRA_PLAYERS: [u32; 6] = [0, 1, 2, 3, 4, 6];
const MIN_AGE: [u32; 8] = [6, 8, 10, 12, 13, 14, 16, 18];

impl Controls {
    fn new() -> Self {
        Self {
            min_players: WeightedIndex::new([15, 65, 15, 5]).unwrap(),
            extra_players: WeightedIndex::new([10, 20, 35, 15, 15, 5]).unwrap(),
            min_age: WeightedIndex::new([5, 15, 20, 25, 10, 15, 7, 3]).unwrap(),
            team: Poisson::new(0.45).unwrap(),
            complexity: Normal::new(2.0, 0.9).unwrap(),
            playing_time: LogNormal::new(60f64.ln(), 0.7).unwrap(),
            ratings: LogNormal::new(4.0, 1.2).unwrap(),
        }
    }

    fn fill(&self, rng: &mut ChaCha8Rng, r: &mut Record) {
        r.genre = GENRES[rng.random_range(0..GENRES.len())].to_string();
        r.team_size = 1 + self.team.sample(rng) as u32;
        r.debut = rng.random_bool(0.35);
        r.complexity = (self.complexity.sample(rng).clamp(0.0, 5.0) * 100.0).round() / 100.0;
        r.playing_time_minutes = self.playing_time.sample(rng).round().min(600.0);
        r.min_players = MIN_PLAYERS[self.min_players.sample(rng)];
        r.max_players = r.min_players + EXTRA_PLAYERS[self.extra_players.sample(rng)];
        r.min_age = MIN_AGE[self.min_age.sample(rng)];
        r.is_expansion = rng.random_bool(0.12);
        r.is_adult = rng.random_bool(0.01);
        r.num_ratings = 10 + self.ratings.sample(rng).floor() as u64;
    }
}

/// Generates the corpus described by `cfg`. Identical configs give identical
/// corpora.
pub fn generate_corpus(cfg: &SynthConfig) -> Result<RecordSet, SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let controls = Controls::new();
    let dim = cfg.dimension;
    let mut records: Vec<Record> = Vec::with_capacity(cfg.games_per_year * (cfg.years.1 - cfg.years.0 + 1) as usize);
    // start offset of each year's block in `records`
    let mut year_start: BTreeMap<i32, usize> = BTreeMap::new();
    for year in cfg.years.0..=cfg.years.1 {
        year_start.insert(year, records.len());
        let sources = if year - cfg.years.0 >= BURN_IN_YEARS { year_start[&(year - 2)]..records.len() } else { 0..0 };
        let share = cfg.crowdfunded_share(year);
        for _ in 0..cfg.games_per_year {
            let crowdfunded = rng.random_bool(share);
            let vector = if !sources.is_empty() && rng.random_bool(cfg.recombination_rate) {
                let src = rng.random_range(sources.clone());
                let boost = if crowdfunded { cfg.novelty_boost } else { 0.0 };
                mutate(&mut rng, &records[src].vector, cfg.base_mutation_rate + boost)
            } else {
                fresh_vector(&mut rng, dim, cfg.base_mechanism_rate)
            };
            let mut r = Record::new(format!("s{:06}", records.len() + 1), year, vector);
            r.crowdfunded = crowdfunded;
            controls.fill(&mut rng, &mut r);
            records.push(r);
        }
    }
    Ok(RecordSet::new(Arc::new(synth_registry(dim)), records).expect("generated records are consistent"))
}
