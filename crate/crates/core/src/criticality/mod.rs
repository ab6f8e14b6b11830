//! Everything defined through "deleting an edge pushes a distance past a
//! threshold".
//!
//! A pair `{x, y}` and an edge `e` are *k-associated* when `d(x, y) ≤ k` and
//! `d_{G−e}(x, y) > k`. A pair with at least one associated edge is
//! *critical*, and its canonical shortest path (lexicographically least, see
//! [`DistanceMatrix::canonical_path`]) is its *critical path*. All of the
//! structure here is computed once per graph and threshold and then read.

mod charging;
mod feet;
mod matched;

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::metric::{self, Bfs, DistanceMatrix, ExtDist, UNREACHED};

pub use charging::{verify_triangle_charging, ChargingReport, TriangleCharge};
pub use feet::{arms, feet, feet_census, feet_triples, triangles, FeetCensus};
pub use matched::{find_k3_associated_path, matched, matched_counts, MatchedCounts};

/// `d(x, y) ≤ k` and `d_{G−e}(x, y) > k`.
pub fn k_associated(g: &Graph, k: u32, x: usize, y: usize, e: EdgeId) -> bool {
    x != y
        && metric::distance(g, x, y) <= k
        && metric::distance_without_edge(g, x, y, e) > k
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CriticalityVerdict {
    Critical,
    /// The graph does not have diameter `k` in the first place.
    DiameterMismatch { actual: ExtDist },
    /// Deleting `edge` keeps the diameter at `k`; the smallest such edge id.
    NonCriticalEdge { edge: EdgeId, endpoints: [usize; 2] },
}

impl CriticalityVerdict {
    pub fn is_critical(&self) -> bool {
        matches!(self, CriticalityVerdict::Critical)
    }
}

/// Exhaustive check that `diameter(g) = k` and every single-edge deletion
/// raises the diameter above `k`.
pub fn is_diameter_k_critical(g: &Graph, k: u32) -> CriticalityVerdict {
    let actual = metric::diameter(g);
    if actual != k {
        return CriticalityVerdict::DiameterMismatch { actual };
    }
    match critical_edge_flags(g, k).iter().position(|&c| !c) {
        None => CriticalityVerdict::Critical,
        Some(i) => {
            let (u, v) = g.endpoints(EdgeId(i));
            CriticalityVerdict::NonCriticalEdge {
                edge: EdgeId(i),
                endpoints: [u, v],
            }
        }
    }
}

/// For a graph of diameter at most `k`, flags every edge whose deletion
/// pushes the diameter above `k`.
///
/// From each source only the edges that are the sole BFS parent of some
/// vertex can change a distance, so only those get a BFS in `G − e`; an edge
/// is skipped once any source has shown it critical.
pub fn critical_edge_flags(g: &Graph, k: u32) -> Vec<bool> {
    let n = g.n();
    let flags: Vec<AtomicBool> = (0..g.m()).map(|_| AtomicBool::new(false)).collect();
    (0..n).into_par_iter().for_each_init(
        || (Bfs::new(g), Bfs::new(g), vec![UNREACHED; n], vec![UNREACHED; n]),
        |(bfs, probe, dist, scratch), x| {
            bfs.run(g, x, None, UNREACHED, dist, true);
            for (u, v) in bfs.sole_parent_edges(g, dist) {
                let e = g.edge_id(u, v).expect("BFS parent edge exists");
                if flags[e.0].load(Ordering::Relaxed) {
                    continue;
                }
                if probe.run(g, x, Some((u, v)), k, scratch, false) < n {
                    flags[e.0].store(true, Ordering::Relaxed);
                }
            }
        },
    );
    flags.into_iter().map(AtomicBool::into_inner).collect()
}

/// A critical pair, its canonical path, and the edges associated with it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalPathRecord {
    /// `(x, y)` with `x < y`.
    pub pair: (usize, usize),
    /// Canonical shortest path from `x` to `y`.
    pub path: Vec<usize>,
    /// Associated edges, ascending.
    pub assoc_edges: Vec<EdgeId>,
}

impl CriticalPathRecord {
    /// Length in edges.
    pub fn len(&self) -> usize {
        self.path.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ids of the path's edges, in path order.
    pub fn path_edges(&self, g: &Graph) -> Vec<EdgeId> {
        path_edge_ids(g, &self.path)
    }

    pub fn is_associated(&self, e: EdgeId) -> bool {
        self.assoc_edges.binary_search(&e).is_ok()
    }
}

pub(crate) fn path_edge_ids(g: &Graph, path: &[usize]) -> Vec<EdgeId> {
    path.windows(2)
        .map(|w| g.edge_id(w[0], w[1]).expect("consecutive path vertices are adjacent"))
        .collect()
}

/// All critical pairs for one threshold `k`, with the inverse edge map.
#[derive(Clone, Debug)]
pub struct CriticalStructure {
    pub k: u32,
    records: Vec<CriticalPathRecord>,
    by_edge: Vec<Vec<usize>>,
    index: HashMap<(usize, usize), usize>,
}

impl CriticalStructure {
    pub fn records(&self) -> &[CriticalPathRecord] {
        &self.records
    }

    pub fn record(&self, i: usize) -> &CriticalPathRecord {
        &self.records[i]
    }

    /// Indices of records associated with `e`, ordered by pair.
    pub fn associated_with(&self, e: EdgeId) -> &[usize] {
        &self.by_edge[e.0]
    }

    pub fn lookup(&self, x: usize, y: usize) -> Option<&CriticalPathRecord> {
        let key = if x < y { (x, y) } else { (y, x) };
        self.index.get(&key).map(|&i| &self.records[i])
    }

    pub fn lookup_index(&self, x: usize, y: usize) -> Option<usize> {
        let key = if x < y { (x, y) } else { (y, x) };
        self.index.get(&key).copied()
    }

    pub fn num_edges(&self) -> usize {
        self.by_edge.len()
    }

    pub fn to_json(&self, g: &Graph, two: &[TwoCriticalRecord]) -> StructureJson {
        let mult = multiplicities(g, self, two);
        StructureJson {
            pairs: self
                .records
                .iter()
                .map(|r| PairJson {
                    pair: [r.pair.0, r.pair.1],
                    path: r.path.clone(),
                    assoc_edges: r
                        .assoc_edges
                        .iter()
                        .map(|&e| {
                            let (u, v) = g.endpoints(e);
                            [u, v]
                        })
                        .collect(),
                })
                .collect(),
            edges: g
                .edge_ids()
                .map(|e| {
                    let (u, v) = g.endpoints(e);
                    EdgeJson {
                        edge: [u, v],
                        p1: mult[e.0].p1,
                        p2: mult[e.0].p2,
                    }
                })
                .collect(),
        }
    }
}

/// Dump format of a critical structure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureJson {
    pub pairs: Vec<PairJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairJson {
    pub pair: [usize; 2],
    pub path: Vec<usize>,
    pub assoc_edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub edge: [usize; 2],
    pub p1: usize,
    pub p2: usize,
}

/// Computes every `k`-critical pair of `g` with its canonical path and
/// associated edges. Works for any graph; pairs at infinite distance are
/// never critical.
pub fn critical_structure(g: &Graph, k: u32) -> CriticalStructure {
    let dm = DistanceMatrix::new(g);
    critical_structure_with(g, k, &dm)
}

pub fn critical_structure_with(g: &Graph, k: u32, dm: &DistanceMatrix) -> CriticalStructure {
    let n = g.n();
    let mut triples: Vec<(usize, usize, EdgeId)> = (0..n)
        .into_par_iter()
        .map_init(
            || (Bfs::new(g), Bfs::new(g), vec![UNREACHED; n], vec![UNREACHED; n]),
            |(bfs, probe, dist, without), x| {
                let mut out = Vec::new();
                bfs.run(g, x, None, UNREACHED, dist, true);
                for (u, v) in bfs.sole_parent_edges(g, dist) {
                    let e = g.edge_id(u, v).expect("BFS parent edge exists");
                    probe.run(g, x, Some((u, v)), k, without, false);
                    for y in x + 1..n {
                        if dist[y] <= k && without[y] > k {
                            out.push((x, y, e));
                        }
                    }
                }
                out
            },
        )
        .flatten()
        .collect();
    triples.sort_unstable();

    let mut records: Vec<CriticalPathRecord> = Vec::new();
    for (x, y, e) in triples {
        match records.last_mut() {
            Some(r) if r.pair == (x, y) => r.assoc_edges.push(e),
            _ => records.push(CriticalPathRecord {
                pair: (x, y),
                path: dm.canonical_path(g, x, y).expect("critical pairs are connected"),
                assoc_edges: vec![e],
            }),
        }
    }
    let mut by_edge = vec![Vec::new(); g.m()];
    let mut index = HashMap::with_capacity(records.len());
    for (i, r) in records.iter_mut().enumerate() {
        r.assoc_edges.sort_unstable();
        for &e in &r.assoc_edges {
            by_edge[e.0].push(i);
        }
        index.insert(r.pair, i);
    }
    CriticalStructure {
        k,
        records,
        by_edge,
        index,
    }
}

/// The unique path of length at most 2 between a 2-critical pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwoCriticalRecord {
    pub pair: (usize, usize),
    /// `[x, y]` or `[x, w, y]`.
    pub path: Vec<usize>,
}

impl TwoCriticalRecord {
    pub fn len(&self) -> usize {
        self.path.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Every pair joined by exactly one path of length at most 2: adjacent pairs
/// with no common neighbor, and non-adjacent pairs with exactly one.
pub fn two_critical_paths(g: &Graph) -> Vec<TwoCriticalRecord> {
    let n = g.n();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|x| {
            (x + 1..n).filter_map(move |y| {
                let common = g.common_neighbor_count(x, y);
                if g.has_edge(x, y) {
                    (common == 0).then(|| TwoCriticalRecord {
                        pair: (x, y),
                        path: vec![x, y],
                    })
                } else if common == 1 {
                    let w = crate::bits::ones(g.row(x))
                        .find(|&w| g.has_edge(w, y))
                        .expect("one common neighbor");
                    Some(TwoCriticalRecord {
                        pair: (x, y),
                        path: vec![x, w, y],
                    })
                } else {
                    None
                }
            })
        })
        .collect()
}

/// `m(e) = p1 + p2`: associated critical paths plus 2-critical paths through `e`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeMultiplicity {
    pub p1: usize,
    pub p2: usize,
}

impl EdgeMultiplicity {
    pub fn total(&self) -> usize {
        self.p1 + self.p2
    }
}

/// Per-edge multiplicities from a precomputed structure and 2-critical list.
pub fn multiplicities(
    g: &Graph,
    structure: &CriticalStructure,
    two: &[TwoCriticalRecord],
) -> Vec<EdgeMultiplicity> {
    let mut out: Vec<EdgeMultiplicity> = (0..g.m())
        .map(|e| EdgeMultiplicity {
            p1: structure.associated_with(EdgeId(e)).len(),
            p2: 0,
        })
        .collect();
    for r in two {
        for e in path_edge_ids(g, &r.path) {
            out[e.0].p2 += 1;
        }
    }
    out
}

/// Multiplicities for a diameter-`k` graph with `k ≥ 3`, where "critical"
/// always means 3-critical (every edge of a diameter-critical graph with
/// diameter at least 3 is 3-associated with some pair).
pub fn multiplicities_for(g: &Graph, k: u32) -> Result<Vec<EdgeMultiplicity>> {
    if k < 3 {
        return Err(Error::PreconditionFailed(format!("multiplicities need k >= 3, got {k}")));
    }
    let actual = metric::diameter(g);
    if actual != k {
        return Err(Error::PreconditionFailed(format!("diameter is {actual}, expected {k}")));
    }
    let structure = critical_structure(g, 3);
    Ok(multiplicities(g, &structure, &two_critical_paths(g)))
}

/// Number of `(x, y)`-paths of length at most `max_len`, by DFS over simple
/// paths. Exponential; intended for short paths.
pub fn count_short_paths(g: &Graph, x: usize, y: usize, max_len: usize) -> usize {
    fn go(g: &Graph, cur: usize, y: usize, left: usize, on: &mut Vec<bool>) -> usize {
        if cur == y {
            return 1;
        }
        if left == 0 {
            return 0;
        }
        let mut total = 0;
        for w in g.neighbors(cur) {
            if !on[w] {
                on[w] = true;
                total += go(g, w, y, left - 1, on);
                on[w] = false;
            }
        }
        total
    }
    let mut on = vec![false; g.n()];
    on[x] = true;
    go(g, x, y, max_len, &mut on)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;

    fn c5() -> Graph {
        Graph::cycle(5).unwrap()
    }

    /// K4 minus the edge {2, 3}: vertices 0 and 1 have degree 3.
    fn k4_minus_edge() -> Graph {
        Graph::build(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    /// Brute force: the set of pairs k-associated with `e`.
    fn associated_pairs_oracle(g: &Graph, k: u32, e: EdgeId) -> Vec<(usize, usize)> {
        let h = g.without_edge(e);
        let mut out = Vec::new();
        for x in 0..g.n() {
            let before = metric::bfs_distances(g, x);
            let after = metric::bfs_distances(&h, x);
            for y in x + 1..g.n() {
                if before[y] <= k && after[y] > k {
                    out.push((x, y));
                }
            }
        }
        out
    }

    #[test]
    fn k_associated_examples() {
        let g = c5();
        let e01 = g.edge_id(0, 1).unwrap();
        assert!(k_associated(&g, 2, 0, 1, e01));
        assert!(k_associated(&g, 2, 0, 2, e01));
        let k4 = Graph::complete(4);
        for e in k4.edge_ids() {
            for x in 0..4 {
                for y in x + 1..4 {
                    assert!(!k_associated(&k4, 2, x, y, e));
                }
            }
        }
    }

    #[test]
    fn criticality_examples() {
        assert!(is_diameter_k_critical(&Graph::complete_bipartite(2, 3), 2).is_critical());
        assert!(is_diameter_k_critical(&Graph::petersen(), 2).is_critical());
        assert!(is_diameter_k_critical(&c5(), 2).is_critical());
        match is_diameter_k_critical(&k4_minus_edge(), 2) {
            CriticalityVerdict::NonCriticalEdge { endpoints, .. } => assert_eq!(endpoints, [0, 1]),
            v => panic!("{v:?}"),
        }
        assert_eq!(
            is_diameter_k_critical(&Graph::complete(4), 2),
            CriticalityVerdict::DiameterMismatch { actual: ExtDist::Finite(1) }
        );
        // stars are critical because deletion disconnects
        assert!(is_diameter_k_critical(&Graph::complete_bipartite(1, 5), 2).is_critical());
    }

    #[test]
    fn edge_flags_match_brute_force() {
        let graphs = [
            Graph::petersen(),
            k4_minus_edge(),
            Graph::cycle(7).unwrap(),
            Graph::cycle(6).unwrap().with_edge(0, 3).unwrap(),
            constructions::build_clique_matching(8).unwrap(),
        ];
        for g in graphs {
            let Some(k) = metric::diameter(&g).finite() else { continue };
            let flags = critical_edge_flags(&g, k);
            for e in g.edge_ids() {
                assert_eq!(flags[e.0], metric::diameter(&g.without_edge(e)) > k, "{g:?} {e}");
            }
        }
    }

    #[test]
    fn structure_examples() {
        let g = c5();
        let s = critical_structure(&g, 2);
        let e01 = g.edge_id(0, 1).unwrap();
        let pairs: Vec<_> = s.associated_with(e01).iter().map(|&i| s.record(i).pair).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 4)]);

        let k23 = Graph::complete_bipartite(2, 3);
        let s = critical_structure(&k23, 2);
        for e in k23.edge_ids() {
            let (u, v) = k23.endpoints(e);
            let pairs: Vec<_> = s.associated_with(e).iter().map(|&i| s.record(i).pair).collect();
            assert_eq!(pairs, vec![(u, v)]);
        }

        let cm = constructions::build_clique_matching(8).unwrap();
        let s = critical_structure(&cm, 3);
        for u in 0..4 {
            let up = u + 4;
            let e = cm.edge_id(u, up).unwrap();
            let pairs: Vec<_> = s.associated_with(e).iter().map(|&i| s.record(i).pair).collect();
            for w in 4..8 {
                if w != up {
                    assert!(pairs.contains(&(up.min(w), up.max(w))));
                }
            }
        }
    }

    #[test]
    fn structure_matches_oracle() {
        let graphs = [
            (c5(), 2),
            (Graph::petersen(), 2),
            (constructions::build_clique_matching(8).unwrap(), 3),
            (constructions::build_layered_dk(4, 1, 2, 2).unwrap(), 4),
            (constructions::build_layered_dk(4, 1, 2, 2).unwrap(), 3),
            (Graph::cycle(6).unwrap().with_edge(0, 3).unwrap(), 3),
        ];
        for (g, k) in graphs {
            let s = critical_structure(&g, k);
            for e in g.edge_ids() {
                let mut got: Vec<_> = s.associated_with(e).iter().map(|&i| s.record(i).pair).collect();
                got.sort();
                assert_eq!(got, associated_pairs_oracle(&g, k, e), "k={k} e={e}");
            }
            for r in s.records() {
                let path_edges = r.path_edges(&g);
                let d = metric::distance(&g, r.pair.0, r.pair.1);
                assert_eq!(d, r.len() as u32);
                assert!(r.len() <= k as usize);
                for &e in &r.assoc_edges {
                    assert!(path_edges.contains(&e));
                    assert!(metric::edge_on_all_shortest(&g, r.pair.0, r.pair.1, e));
                }
                if r.assoc_edges.len() >= 2 && k <= 3 {
                    assert_eq!(count_short_paths(&g, r.pair.0, r.pair.1, k as usize), 1);
                }
            }
        }
    }

    #[test]
    fn structure_is_deterministic() {
        let g = constructions::build_clique_matching(10).unwrap();
        let a = critical_structure(&g, 3);
        let b = critical_structure(&g.relabel(&(0..10).collect::<Vec<_>>()).unwrap(), 3);
        let two = two_critical_paths(&g);
        let ja = serde_json::to_string(&a.to_json(&g, &two)).unwrap();
        let jb = serde_json::to_string(&b.to_json(&g, &two)).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn two_critical_examples() {
        let p = Graph::path(3);
        let recs = two_critical_paths(&p);
        let paths: Vec<_> = recs.iter().map(|r| r.path.clone()).collect();
        assert_eq!(paths, vec![vec![0, 1], vec![0, 1, 2], vec![1, 2]]);
        let c4 = Graph::cycle(4).unwrap();
        let recs = two_critical_paths(&c4);
        assert_eq!(recs.len(), 4);
        assert!(recs.iter().all(|r| r.len() == 1));
    }

    #[test]
    fn two_critical_matches_path_count_oracle() {
        let g = constructions::build_clique_matching(8).unwrap().with_edge(4, 5).unwrap();
        let recs = two_critical_paths(&g);
        for x in 0..g.n() {
            for y in x + 1..g.n() {
                let unique = count_short_paths(&g, x, y, 2) == 1;
                assert_eq!(unique, recs.iter().any(|r| r.pair == (x, y)));
            }
        }
    }

    #[test]
    fn multiplicity_example_clique_matching() {
        let g = constructions::build_clique_matching(8).unwrap();
        let mult = multiplicities_for(&g, 3).unwrap();
        for u in 0..4 {
            let e = g.edge_id(u, u + 4).unwrap();
            // w-u-u' for the three other clique vertices w, plus the edge itself
            assert_eq!(mult[e.0].p2, 4);
            // every pair containing u' is associated
            assert_eq!(mult[e.0].p1, 7);
            assert!(mult[e.0].p1 >= 1);
        }
        for (u, v) in g.edges().filter(|&(u, v)| u < 4 && v < 4) {
            let e = g.edge_id(u, v).unwrap();
            // p1: only the pair {u', v'}; p2: u'-u-v and u-v-v'
            assert_eq!(mult[e.0], EdgeMultiplicity { p1: 1, p2: 2 });
        }
        assert!(multiplicities_for(&Graph::cycle(5).unwrap(), 2).is_err());
    }
}
