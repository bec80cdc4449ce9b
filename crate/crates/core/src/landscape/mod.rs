//! Type landscape: a network whose nodes are the unique feature vectors
//! realised by at least one record and whose edges join vectors at Hamming
//! distance exactly one.
//!
//! Snapshots are cumulative: the graph for year `y` counts every record
//! published up to and including `y`. Which nodes are drawn is decided by the
//! whole-corpus count (`min_type_count`), so early snapshots already know
//! which types will become common.

mod export;
mod layout;
mod svg;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{MechanismVector, RecordSet};

pub use export::{export_graph, parse_graph, ExportFormat, ExportNode, ExportedGraph};
pub use layout::{final_layout, kamada_kawai, layout, main_component, LayoutOptions, Point, Positions};
pub use svg::render_svg;

#[derive(Debug, Error)]
pub enum LandscapeError {
    #[error("no plotted nodes to lay out")]
    EmptyGraph,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FundingGroup {
    Crowdfunded,
    Traditional,
}

impl FundingGroup {
    pub fn of(crowdfunded: bool) -> Self {
        if crowdfunded {
            Self::Crowdfunded
        } else {
            Self::Traditional
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Crowdfunded => "crowdfunded",
            Self::Traditional => "traditional",
        }
    }
}

/// Colouring class of a node at one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShareClass {
    /// Crowdfunded share at or above the threshold.
    Hotspot,
    /// Was a hotspot in an earlier snapshot, now below the threshold.
    FormerHotspot,
    Ordinary,
}

impl ShareClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Hotspot => "hotspot",
            Self::FormerHotspot => "former_hotspot",
            Self::Ordinary => "ordinary",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hotspot" => Some(Self::Hotspot),
            "former_hotspot" => Some(Self::FormerHotspot),
            "ordinary" => Some(Self::Ordinary),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeNode {
    pub vector: MechanismVector,
    /// Records with this vector published up to the snapshot year.
    pub total_count: u64,
    pub crowdfunded_count: u64,
    pub first_year: i32,
    pub first_funding: FundingGroup,
    /// Records with this vector in the whole corpus.
    pub corpus_count: u64,
    pub class: ShareClass,
}

impl TypeNode {
    pub fn cf_share(&self) -> f64 {
        self.crowdfunded_count as f64 / self.total_count as f64
    }

    pub fn id(&self) -> String {
        self.vector.to_hex()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LandscapeParams {
    /// A type is drawn when at least this many records in the whole corpus
    /// implement it.
    pub min_type_count: u64,
    pub cf_share_threshold: f64,
}

impl Default for LandscapeParams {
    fn default() -> Self {
        Self { min_type_count: 6, cf_share_threshold: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGraph {
    pub snapshot_year: i32,
    /// Plotted nodes, sorted by vector.
    pub nodes: Vec<TypeNode>,
    /// Index pairs `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Unique vectors present at the snapshot but below `min_type_count`.
    pub unplotted_types: usize,
}

impl LandscapeGraph {
    pub fn node_index(&self) -> HashMap<&MechanismVector, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (&n.vector, i)).collect()
    }

    pub fn find(&self, v: &MechanismVector) -> Option<&TypeNode> {
        self.nodes.binary_search_by(|n| n.vector.cmp(v)).ok().map(|i| &self.nodes[i])
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// All index pairs of `vectors` at Hamming distance one, found by flipping
/// each bit and looking the result up: `O(n · dimension)` hash lookups.
pub fn hamming_one_edges(vectors: &[MechanismVector]) -> Vec<(usize, usize)> {
    let index: HashMap<&MechanismVector, usize> = vectors.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut edges: Vec<(usize, usize)> = vectors
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, v)| {
            let mut probe = v.clone();
            let mut found = Vec::new();
            for j in 0..v.dim() {
                probe.flip(j);
                if let Some(&k) = index.get(&probe) {
                    if k > i {
                        found.push((i, k));
                    }
                }
                probe.flip(j);
            }
            found
        })
        .collect();
    edges.sort_unstable();
    edges
}

struct Tally {
    total: u64,
    cf: u64,
    first: (i32, String, bool),
}

/// Builds the snapshot graph for records published up to `up_to_year`.
pub fn build_landscape(records: &RecordSet, up_to_year: i32, params: &LandscapeParams) -> LandscapeGraph {
    let mut corpus_counts: HashMap<&MechanismVector, u64> = HashMap::new();
    let mut tallies: HashMap<&MechanismVector, Tally> = HashMap::new();
    for r in records {
        *corpus_counts.entry(&r.vector).or_default() += 1;
        if r.year > up_to_year {
            continue;
        }
        let t = tallies.entry(&r.vector).or_insert_with(|| Tally {
            total: 0,
            cf: 0,
            first: (r.year, r.id.clone(), r.crowdfunded),
        });
        t.total += 1;
        t.cf += u64::from(r.crowdfunded);
        if (r.year, &r.id) < (t.first.0, &t.first.1) {
            t.first = (r.year, r.id.clone(), r.crowdfunded);
        }
    }
    let mut nodes = Vec::new();
    let mut unplotted = 0;
    for (v, t) in tallies {
        let corpus_count = corpus_counts[v];
        if corpus_count < params.min_type_count {
            unplotted += 1;
            continue;
        }
        let share = t.cf as f64 / t.total as f64;
        nodes.push(TypeNode {
            vector: v.clone(),
            total_count: t.total,
            crowdfunded_count: t.cf,
            first_year: t.first.0,
            first_funding: FundingGroup::of(t.first.2),
            corpus_count,
            class: if share >= params.cf_share_threshold { ShareClass::Hotspot } else { ShareClass::Ordinary },
        });
    }
    nodes.sort_by(|a, b| a.vector.cmp(&b.vector));
    let vectors: Vec<MechanismVector> = nodes.iter().map(|n| n.vector.clone()).collect();
    LandscapeGraph { snapshot_year: up_to_year, edges: hamming_one_edges(&vectors), nodes, unplotted_types: unplotted }
}

/// Builds one snapshot per year (ascending) and marks nodes that were
/// hotspots in an earlier snapshot but have since dropped below the
/// threshold.
pub fn build_snapshots(records: &RecordSet, years: &[i32], params: &LandscapeParams) -> Vec<LandscapeGraph> {
    let mut years = years.to_vec();
    years.sort_unstable();
    years.dedup();
    let mut ever_hot: std::collections::HashSet<MechanismVector> = Default::default();
    let mut out = Vec::with_capacity(years.len());
    for y in years {
        let mut g = build_landscape(records, y, params);
        for n in &mut g.nodes {
            match n.class {
                ShareClass::Hotspot => {
                    ever_hot.insert(n.vector.clone());
                }
                _ if ever_hot.contains(&n.vector) => n.class = ShareClass::FormerHotspot,
                _ => {}
            }
        }
        out.push(g);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentroidWeighting {
    /// Each node weighted by the group's record count there.
    #[default]
    Records,
    /// Each node the group has used weighted equally.
    Types,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Centroid {
    pub group: FundingGroup,
    pub point: Point,
    pub year: i32,
}

/// Weighted mean layout position of the nodes each funding group has used,
/// counting records published up to `year`. Records whose type has no
/// position are ignored; a group with nothing to average gets `None`.
pub fn centroids(
    positions: &Positions,
    records: &RecordSet,
    year: i32,
    weighting: CentroidWeighting,
) -> (Option<Centroid>, Option<Centroid>) {
    let mut counts: BTreeMap<(&MechanismVector, bool), u64> = BTreeMap::new();
    for r in records {
        if r.year <= year && positions.contains_key(&r.vector) {
            *counts.entry((&r.vector, r.crowdfunded)).or_default() += 1;
        }
    }
    let centroid = |cf: bool| {
        let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
        for (&(v, c), &n) in &counts {
            if c != cf {
                continue;
            }
            let w = match weighting {
                CentroidWeighting::Records => n as f64,
                CentroidWeighting::Types => 1.0,
            };
            let p = positions[v];
            sx += w * p.x;
            sy += w * p.y;
            sw += w;
        }
        (sw > 0.0).then(|| Centroid { group: FundingGroup::of(cf), point: Point { x: sx / sw, y: sy / sw }, year })
    };
    (centroid(true), centroid(false))
}
