//! Spring layout minimising the Kamada-Kawai energy
//! `Σ_{i<j} (|x_i - x_j| - d_ij)² / d_ij²`, where `d_ij` is the shortest-path
//! length. The energy is minimised by stress majorization: each sweep moves
//! every node, in index order, to the minimiser of its local majorant, which
//! never increases the energy.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LandscapeError, LandscapeGraph};
use crate::corpus::MechanismVector;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

pub type Positions = BTreeMap<MechanismVector, Point>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutOptions {
    pub max_sweeps: usize,
    /// Stop when the relative energy decrease of a sweep falls below this.
    pub tolerance: f64,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        Self { max_sweeps: 2000, tolerance: 1e-9 }
    }
}

/// Node indices of the largest connected component. Ties go to the component
/// containing the lowest index.
pub fn main_component(n: usize, adjacency: &[Vec<usize>]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; n];
    let mut best: Vec<usize> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut members = vec![start];
        comp[start] = start;
        let mut i = 0;
        while i < members.len() {
            let u = members[i];
            for &v in &adjacency[u] {
                if comp[v] == usize::MAX {
                    comp[v] = start;
                    members.push(v);
                }
            }
            i += 1;
        }
        if members.len() > best.len() {
            best = members;
        }
    }
    best.sort_unstable();
    best
}

fn bfs_distances(adjacency: &[Vec<usize>], source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adjacency.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn energy(pos: &[Point], dist: &[Vec<u32>]) -> f64 {
    let mut e = 0.0;
    for i in 0..pos.len() {
        for j in (i + 1)..pos.len() {
            let d = dist[i][j] as f64;
            let diff = pos[i].dist(&pos[j]) - d;
            e += diff * diff / (d * d);
        }
    }
    e
}

/// Lays out a connected graph given by its adjacency lists. Returns one point
/// per node, centred on the origin.
pub fn kamada_kawai(adjacency: &[Vec<usize>], seed: u64, opts: &LayoutOptions) -> Vec<Point> {
    let n = adjacency.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![Point::default()];
    }
    let dist: Vec<Vec<u32>> = (0..n).map(|s| bfs_distances(adjacency, s)).collect();
    assert!(dist.iter().all(|row| row.iter().all(|&d| d != u32::MAX)), "layout requires a connected graph");
    let diameter = dist.iter().flatten().copied().max().unwrap_or(1) as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<Point> = (0..n)
        .map(|_| Point { x: rng.random_range(-0.5..0.5) * diameter, y: rng.random_range(-0.5..0.5) * diameter })
        .collect();

    let mut prev = energy(&pos, &dist);
    for _ in 0..opts.max_sweeps {
        for i in 0..n {
            let (mut nx, mut ny, mut wsum) = (0.0, 0.0, 0.0);
            let pi = pos[i];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = dist[i][j] as f64;
                let w = 1.0 / (d * d);
                let pj = pos[j];
                let cur = pi.dist(&pj);
                let (ux, uy) = if cur > 1e-12 { ((pi.x - pj.x) / cur, (pi.y - pj.y) / cur) } else { (0.0, 0.0) };
                nx += w * (pj.x + d * ux);
                ny += w * (pj.y + d * uy);
                wsum += w;
            }
            pos[i] = Point { x: nx / wsum, y: ny / wsum };
        }
        let e = energy(&pos, &dist);
        let done = prev - e <= opts.tolerance * prev.max(f64::MIN_POSITIVE);
        prev = e;
        if done {
            break;
        }
    }

    let cx = pos.iter().map(|p| p.x).sum::<f64>() / n as f64;
    let cy = pos.iter().map(|p| p.y).sum::<f64>() / n as f64;
    for p in &mut pos {
        p.x -= cx;
        p.y -= cy;
    }
    pos
}

/// Computes positions once on the main component of `final_graph` and
/// returns those of `graph`'s nodes that lie in it. Nodes outside the final
/// main component get no position.
pub fn layout(graph: &LandscapeGraph, final_graph: &LandscapeGraph, seed: u64) -> Result<Positions, LandscapeError> {
    let all = final_layout(final_graph, seed, &LayoutOptions::default())?;
    let out: Positions =
        graph.nodes.iter().filter_map(|n| all.get(&n.vector).map(|p| (n.vector.clone(), *p))).collect();
    if out.is_empty() {
        return Err(LandscapeError::EmptyGraph);
    }
    Ok(out)
}

/// Positions for every node in the main component of `graph`.
pub fn final_layout(graph: &LandscapeGraph, seed: u64, opts: &LayoutOptions) -> Result<Positions, LandscapeError> {
    if graph.nodes.is_empty() {
        return Err(LandscapeError::EmptyGraph);
    }
    let adj = graph.adjacency();
    let main = main_component(graph.nodes.len(), &adj);
    let local: BTreeMap<usize, usize> = main.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let sub_adj: Vec<Vec<usize>> = main.iter().map(|&i| adj[i].iter().map(|j| local[j]).collect()).collect();
    let pts = kamada_kawai(&sub_adj, seed, opts);
    Ok(main.iter().zip(pts).map(|(&i, p)| (graph.nodes[i].vector.clone(), p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_at_origin() {
        assert_eq!(kamada_kawai(&[vec![]], 42, &LayoutOptions::default()), vec![Point::default()]);
    }

    #[test]
    fn path_is_evenly_spaced() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let p = kamada_kawai(&adj, 42, &LayoutOptions::default());
        let ab = p[0].dist(&p[1]);
        let bc = p[1].dist(&p[2]);
        assert!((ab / bc - 1.0).abs() < 0.2, "ab={ab} bc={bc}");
        // collinear: A-C spans both segments
        assert!((p[0].dist(&p[2]) - (ab + bc)).abs() < 1e-3, "{p:?} ab={ab} bc={bc}");
    }

    #[test]
    fn deterministic_for_seed() {
        let adj = vec![vec![1, 2], vec![0, 2, 3], vec![0, 1], vec![1, 4], vec![3]];
        let a = kamada_kawai(&adj, 7, &LayoutOptions::default());
        let b = kamada_kawai(&adj, 7, &LayoutOptions::default());
        assert_eq!(a, b);
    }

    #[test]
    fn square_cycle_distances() {
        // 4-cycle: adjacent pairs at distance 1, diagonals at 2 cannot both be
        // satisfied; the optimum keeps adjacent spacing close to 1.
        let adj = vec![vec![1, 3], vec![0, 2], vec![1, 3], vec![2, 0]];
        let p = kamada_kawai(&adj, 1, &LayoutOptions::default());
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            let d = p[a].dist(&p[b]);
            assert!((d - 1.0).abs() < 0.35, "edge {a}-{b} has length {d}");
        }
    }

    #[test]
    fn main_component_prefers_largest() {
        let adj = vec![vec![], vec![2], vec![1, 3], vec![2]];
        assert_eq!(main_component(4, &adj), vec![1, 2, 3]);
        let adj = vec![vec![1], vec![0], vec![3], vec![2]];
        assert_eq!(main_component(4, &adj), vec![0, 1]);
    }
}
