use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::record::{Record, RecordSet};

/// Thresholds for building the analysis set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub min_mechanisms: u32,
    pub min_ratings: u64,
    /// Drop records with `team_size == 0`.
    pub require_designer: bool,
    pub drop_trivial_expansions: bool,
    pub year_min: i32,
    /// Inclusive; `None` leaves the range open.
    pub year_max: Option<i32>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_mechanisms: 2,
            min_ratings: 10,
            require_designer: true,
            drop_trivial_expansions: true,
            year_min: 2006,
            year_max: None,
        }
    }
}

/// Rule names, in the order they are checked. A record failing several rules
/// is counted under the first.
pub const RULES: [&str; 5] = ["year_range", "min_mechanisms", "min_ratings", "designer", "trivial_expansion"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input_count: usize,
    pub output_count: usize,
    pub dropped: BTreeMap<String, usize>,
    /// Expansions kept because they carry no `parent_id` (or the parent is not
    /// in the input).
    pub unmatched_expansions: usize,
}

fn failed_rule(r: &Record, cfg: &FilterConfig, parents: &HashMap<&str, &Record>) -> Option<&'static str> {
    if r.year < cfg.year_min || cfg.year_max.is_some_and(|max| r.year > max) {
        return Some(RULES[0]);
    }
    if r.vector.popcount() < cfg.min_mechanisms {
        return Some(RULES[1]);
    }
    if r.num_ratings < cfg.min_ratings {
        return Some(RULES[2]);
    }
    if cfg.require_designer && r.team_size == 0 {
        return Some(RULES[3]);
    }
    if cfg.drop_trivial_expansions && r.is_expansion {
        let parent = r.parent_id.as_deref().and_then(|p| parents.get(p));
        if parent.is_some_and(|p| p.id != r.id && p.vector == r.vector) {
            return Some(RULES[4]);
        }
    }
    None
}

/// Applies the filtering protocol. Parents of expansions are resolved
/// against the full input, so the result does not depend on record order.
pub fn apply_filters(records: &RecordSet, cfg: &FilterConfig) -> (RecordSet, FilterReport) {
    let parents = records.by_id();
    let mut dropped: BTreeMap<String, usize> = RULES.iter().map(|r| (r.to_string(), 0)).collect();
    let mut unmatched = 0;
    let out = records.filtered(|r| match failed_rule(r, cfg, &parents) {
        Some(rule) => {
            *dropped.get_mut(rule).expect("known rule") += 1;
            false
        }
        None => {
            if r.is_expansion && r.parent_id.as_deref().is_none_or(|p| !parents.contains_key(p)) {
                unmatched += 1;
            }
            true
        }
    });
    let report =
        FilterReport { input_count: records.len(), output_count: out.len(), dropped, unmatched_expansions: unmatched };
    (out, report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;
    use crate::corpus::{FeatureRegistry, MechanismVector};

    fn reg(dim: usize) -> Arc<FeatureRegistry> {
        Arc::new(FeatureRegistry::new((0..dim).map(|i| format!("f{i}"))).unwrap())
    }

    fn rec(id: &str, year: i32, bits: &str) -> Record {
        Record::new(id, year, MechanismVector::from_bit_str(bits).unwrap())
    }

    #[test]
    fn drops_single_mechanism() {
        let set = RecordSet::new(reg(4), vec![rec("a", 2010, "1000"), rec("b", 2010, "1100")]).unwrap();
        let (out, report) = apply_filters(&set, &FilterConfig::default());
        assert_eq!(out.len(), 1);
        assert_eq!(out.records()[0].id, "b");
        assert_eq!(report.dropped["min_mechanisms"], 1);
        assert_eq!(report.input_count, 2);
        assert_eq!(report.output_count, 1);
    }

    #[test]
    fn trivial_expansion_dropped_nontrivial_kept() {
        let parent = rec("p", 2010, "1100");
        let mut trivial = rec("e1", 2011, "1100");
        trivial.is_expansion = true;
        trivial.parent_id = Some("p".into());
        let mut changed = rec("e2", 2011, "1110");
        changed.is_expansion = true;
        changed.parent_id = Some("p".into());
        let mut orphan = rec("e3", 2011, "1100");
        orphan.is_expansion = true;
        let set = RecordSet::new(reg(4), vec![parent, trivial, changed, orphan]).unwrap();
        let (out, report) = apply_filters(&set, &FilterConfig::default());
        let ids: Vec<_> = out.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["p", "e2", "e3"]);
        assert_eq!(report.dropped["trivial_expansion"], 1);
        assert_eq!(report.unmatched_expansions, 1);
    }

    #[test]
    fn ratings_designer_and_years() {
        let mut few = rec("few", 2010, "1100");
        few.num_ratings = 9;
        let mut anon = rec("anon", 2010, "1100");
        anon.team_size = 0;
        let old = rec("old", 2005, "1100");
        let late = rec("late", 2018, "1100");
        let set = RecordSet::new(reg(4), vec![few, anon, old, late]).unwrap();
        let cfg = FilterConfig { year_max: Some(2017), ..FilterConfig::default() };
        let (out, report) = apply_filters(&set, &cfg);
        assert!(out.is_empty());
        assert_eq!(report.dropped["min_ratings"], 1);
        assert_eq!(report.dropped["designer"], 1);
        assert_eq!(report.dropped["year_range"], 2);
        let relaxed = FilterConfig { require_designer: false, ..cfg };
        assert_eq!(apply_filters(&set, &relaxed).0.len(), 1);
    }

    fn arb_records() -> impl Strategy<Value = Vec<Record>> {
        prop::collection::vec((2004i32..2012, 0u16..64, 0u64..20, any::<bool>(), 0usize..30, 0u32..3), 1..30).prop_map(
            |rows| {
                rows.into_iter()
                    .enumerate()
                    .map(|(i, (year, bits, ratings, exp, parent, team))| {
                        let v = MechanismVector::from_indices(6, (0..6).filter(|j| bits >> j & 1 == 1));
                        let mut r = Record::new(format!("r{i}"), year, v);
                        r.num_ratings = ratings;
                        r.is_expansion = exp;
                        r.team_size = team;
                        if exp {
                            r.parent_id = Some(format!("r{parent}"));
                        }
                        r
                    })
                    .collect()
            },
        )
    }

    proptest! {
        #[test]
        fn idempotent(records in arb_records()) {
            let set = RecordSet::new(reg(6), records).unwrap();
            let cfg = FilterConfig::default();
            let (once, _) = apply_filters(&set, &cfg);
            let (twice, report) = apply_filters(&once, &cfg);
            prop_assert_eq!(once.records(), twice.records());
            prop_assert_eq!(report.output_count, report.input_count);
        }

        #[test]
        fn order_independent(records in arb_records(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut shuffled = records.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let cfg = FilterConfig::default();
            let (a, _) = apply_filters(&RecordSet::new(reg(6), records).unwrap(), &cfg);
            let (b, _) = apply_filters(&RecordSet::new(reg(6), shuffled).unwrap(), &cfg);
            let mut ids_a: Vec<_> = a.iter().map(|r| r.id.clone()).collect();
            let mut ids_b: Vec<_> = b.iter().map(|r| r.id.clone()).collect();
            ids_a.sort();
            ids_b.sort();
            prop_assert_eq!(ids_a, ids_b);
        }

        #[test]
        fn retained_satisfy_thresholds(records in arb_records()) {
            let set = RecordSet::new(reg(6), records).unwrap();
            let cfg = FilterConfig::default();
            let (out, _) = apply_filters(&set, &cfg);
            for r in &out {
                prop_assert!(r.vector.popcount() >= cfg.min_mechanisms);
                prop_assert!(r.num_ratings >= cfg.min_ratings);
                prop_assert!(r.year >= cfg.year_min);
                prop_assert!(r.team_size >= 1);
            }
        }

        #[test]
        fn encoding_round_trip(bits in prop::collection::vec(any::<bool>(), 51)) {
            let reg = FeatureRegistry::canonical();
            let v = MechanismVector::from_indices(51, bits.iter().enumerate().filter(|(_, b)| **b).map(|(j, _)| j));
            let names = reg.decode(&v);
            prop_assert_eq!(reg.encode(names).unwrap(), v);
        }
    }
}
