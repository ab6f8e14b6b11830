//! Distances, eccentricities, diameter, and distances with one edge removed.
//!
//! Every query runs a bit-parallel BFS: the frontier is a bit row and each
//! level is the union of the frontier's adjacency rows minus the visited set,
//! so one BFS costs O(n · n/64) word operations. Deleting an edge never copies
//! the graph; the BFS masks the edge out while expanding its endpoints.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};

/// Raw distance value used by the kernels; `UNREACHED` encodes infinity.
pub const UNREACHED: u32 = u32::MAX;

/// A path length, or infinity when no path exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtDist {
    Finite(u32),
    Infinite,
}

impl ExtDist {
    #[inline]
    pub fn from_raw(d: u32) -> ExtDist {
        if d == UNREACHED {
            ExtDist::Infinite
        } else {
            ExtDist::Finite(d)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtDist::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            ExtDist::Finite(d) => Some(d),
            ExtDist::Infinite => None,
        }
    }

    pub fn saturating_add(self, other: ExtDist) -> ExtDist {
        match (self, other) {
            (ExtDist::Finite(a), ExtDist::Finite(b)) => a
                .checked_add(b)
                .filter(|&s| s != UNREACHED)
                .map_or(ExtDist::Infinite, ExtDist::Finite),
            _ => ExtDist::Infinite,
        }
    }
}

impl From<u32> for ExtDist {
    fn from(d: u32) -> Self {
        ExtDist::Finite(d)
    }
}

impl PartialEq<u32> for ExtDist {
    fn eq(&self, other: &u32) -> bool {
        *self == ExtDist::Finite(*other)
    }
}

impl PartialOrd<u32> for ExtDist {
    fn partial_cmp(&self, other: &u32) -> Option<std::cmp::Ordering> {
        self.partial_cmp(&ExtDist::Finite(*other))
    }
}

impl fmt::Display for ExtDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtDist::Finite(d) => write!(f, "{d}"),
            ExtDist::Infinite => f.write_str("inf"),
        }
    }
}

/// Finite values serialize as numbers, infinity as the string `"inf"`.
impl Serialize for ExtDist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtDist::Finite(d) => s.serialize_u32(*d),
            ExtDist::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtDist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtDist::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(ExtDist::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad distance {s:?}"))),
        }
    }
}

/// Reusable BFS buffers. Not shared between threads; create one per worker.
pub struct Bfs {
    visited: Vec<u64>,
    frontier: Vec<u64>,
    next: Vec<u64>,
    levels: Vec<u64>,
    depth: usize,
}

impl Bfs {
    pub fn new(g: &Graph) -> Bfs {
        let w = g.words();
        Bfs {
            visited: vec![0; w],
            frontier: vec![0; w],
            next: vec![0; w],
            levels: Vec::new(),
            depth: 0,
        }
    }

    /// Fills `dist` with BFS levels from `source` up to `max_depth`, treating
    /// `skip` (if any) as absent. Unreached vertices get [`UNREACHED`].
    /// Returns the number of reached vertices. When `keep_levels` is set, the
    /// per-level bit rows stay available through [`Bfs::level`].
    pub fn run(
        &mut self,
        g: &Graph,
        source: usize,
        skip: Option<(usize, usize)>,
        max_depth: u32,
        dist: &mut [u32],
        keep_levels: bool,
    ) -> usize {
        let words = g.words();
        dist.fill(UNREACHED);
        self.visited.fill(0);
        self.frontier.fill(0);
        bits::set(&mut self.visited, source);
        bits::set(&mut self.frontier, source);
        dist[source] = 0;
        self.levels.clear();
        self.depth = 0;
        if keep_levels {
            self.levels.extend_from_slice(&self.frontier);
        }
        let mut reached = 1;
        let mut depth = 0u32;
        while depth < max_depth {
            self.next.fill(0);
            for v in bits::ones(&self.frontier) {
                let row = g.row(v);
                let dropped = match skip {
                    Some((a, b)) if v == a => Some(b),
                    Some((a, b)) if v == b => Some(a),
                    _ => None,
                };
                match dropped {
                    None => {
                        for (nw, &rw) in self.next.iter_mut().zip(row) {
                            *nw |= rw;
                        }
                    }
                    Some(d) => {
                        let (dw, mask) = (d >> 6, !(1u64 << (d & 63)));
                        for (i, (nw, &rw)) in self.next.iter_mut().zip(row).enumerate() {
                            *nw |= if i == dw { rw & mask } else { rw };
                        }
                    }
                }
            }
            let mut any = false;
            for i in 0..words {
                self.next[i] &= !self.visited[i];
                self.visited[i] |= self.next[i];
                any |= self.next[i] != 0;
            }
            if !any {
                break;
            }
            depth += 1;
            for v in bits::ones(&self.next) {
                dist[v] = depth;
                reached += 1;
            }
            if keep_levels {
                self.levels.extend_from_slice(&self.next);
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        self.depth = depth as usize;
        reached
    }

    /// Bit row of the vertices at distance `d` from the last source (only
    /// after a run with `keep_levels`).
    pub fn level(&self, g: &Graph, d: usize) -> &[u64] {
        let w = g.words();
        &self.levels[d * w..(d + 1) * w]
    }

    /// Edges `(parent, child)` such that `parent` is the only neighbor of
    /// `child` one level closer to the last source. These are exactly the
    /// edges whose deletion changes some distance from that source. Requires
    /// a run with `keep_levels` and `skip = None`.
    pub fn sole_parent_edges(&self, g: &Graph, dist: &[u32]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (v, &d) in dist.iter().enumerate() {
            if d == 0 || d == UNREACHED {
                continue;
            }
            let prev = self.level(g, d as usize - 1);
            let row = g.row(v);
            let mut count = 0;
            let mut parent = 0;
            for (i, (&a, &b)) in row.iter().zip(prev).enumerate() {
                let w = a & b;
                if w != 0 {
                    count += w.count_ones();
                    parent = i * 64 + w.trailing_zeros() as usize;
                    if count > 1 {
                        break;
                    }
                }
            }
            if count == 1 {
                out.push((parent, v));
            }
        }
        out
    }
}

/// Exact distances from `source`; unreachable vertices are infinite.
pub fn bfs_distances(g: &Graph, source: usize) -> Vec<ExtDist> {
    raw_distances(g, source, None).into_iter().map(ExtDist::from_raw).collect()
}

pub(crate) fn raw_distances(g: &Graph, source: usize, skip: Option<(usize, usize)>) -> Vec<u32> {
    let mut dist = vec![UNREACHED; g.n()];
    Bfs::new(g).run(g, source, skip, UNREACHED, &mut dist, false);
    dist
}

pub fn distance(g: &Graph, x: usize, y: usize) -> ExtDist {
    ExtDist::from_raw(raw_distances(g, x, None)[y])
}

pub fn eccentricity(g: &Graph, source: usize) -> ExtDist {
    let mut dist = vec![UNREACHED; g.n()];
    let reached = Bfs::new(g).run(g, source, None, UNREACHED, &mut dist, false);
    if reached < g.n() {
        ExtDist::Infinite
    } else {
        ExtDist::Finite(dist.iter().copied().max().unwrap_or(0))
    }
}

/// Maximum distance over all pairs; infinite iff disconnected, 0 for n ≤ 1.
pub fn diameter(g: &Graph) -> ExtDist {
    (0..g.n())
        .into_par_iter()
        .map_init(
            || (Bfs::new(g), vec![UNREACHED; g.n()]),
            |(bfs, dist), s| {
                let reached = bfs.run(g, s, None, UNREACHED, dist, false);
                if reached < g.n() {
                    ExtDist::Infinite
                } else {
                    ExtDist::Finite(dist.iter().copied().max().unwrap_or(0))
                }
            },
        )
        .max()
        .unwrap_or(ExtDist::Finite(0))
}

/// True iff every pair is within distance `k`.
pub fn diameter_at_most(g: &Graph, k: u32) -> bool {
    (0..g.n()).into_par_iter().all(|s| {
        let mut dist = vec![UNREACHED; g.n()];
        Bfs::new(g).run(g, s, None, k, &mut dist, false) == g.n()
    })
}

/// d_{G−e}(x, y) computed without copying the graph.
pub fn distance_without_edge(g: &Graph, x: usize, y: usize, e: EdgeId) -> ExtDist {
    ExtDist::from_raw(raw_distances(g, x, Some(g.endpoints(e)))[y])
}

/// Whether `e` lies on every shortest `(x, y)`-path.
pub fn edge_on_all_shortest(g: &Graph, x: usize, y: usize, e: EdgeId) -> bool {
    let d = distance(g, x, y);
    debug_assert!(d.is_finite(), "edge_on_all_shortest needs a finite distance");
    distance_without_edge(g, x, y, e) > d
}

/// All-pairs distance table, `n²` entries of `u32`.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
}

impl DistanceMatrix {
    pub fn new(g: &Graph) -> DistanceMatrix {
        let n = g.n();
        let mut d = vec![UNREACHED; n * n];
        d.par_chunks_mut(n.max(1)).enumerate().for_each_init(
            || Bfs::new(g),
            |bfs, (s, row)| {
                if s < n {
                    bfs.run(g, s, None, UNREACHED, row, false);
                }
            },
        );
        DistanceMatrix { n, d }
    }

    #[inline]
    pub fn raw(&self, x: usize, y: usize) -> u32 {
        self.d[x * self.n + y]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> ExtDist {
        ExtDist::from_raw(self.raw(x, y))
    }

    pub fn row(&self, x: usize) -> &[u32] {
        &self.d[x * self.n..(x + 1) * self.n]
    }

    pub fn diameter(&self) -> ExtDist {
        self.d.iter().copied().max().map_or(ExtDist::Finite(0), ExtDist::from_raw)
    }

    /// Lexicographically least shortest path from `x` to `y`: each step takes
    /// the smallest neighbor one step closer to `y`.
    pub fn canonical_path(&self, g: &Graph, x: usize, y: usize) -> Result<Vec<usize>> {
        let d = self.raw(x, y);
        if d == UNREACHED {
            return Err(Error::Unreachable { x, y });
        }
        let to_y = self.row(y);
        let mut path = Vec::with_capacity(d as usize + 1);
        path.push(x);
        let mut cur = x;
        while cur != y {
            let want = to_y[cur] - 1;
            cur = g
                .neighbors(cur)
                .find(|&w| to_y[w] == want)
                .expect("a BFS predecessor always exists");
            path.push(cur);
        }
        Ok(path)
    }
}

/// Lexicographically least shortest `(x, y)`-path.
pub fn canonical_shortest_path(g: &Graph, x: usize, y: usize) -> Result<Vec<usize>> {
    let to_y = raw_distances(g, y, None);
    if to_y[x] == UNREACHED {
        return Err(Error::Unreachable { x, y });
    }
    let mut path = vec![x];
    let mut cur = x;
    while cur != y {
        let want = to_y[cur] - 1;
        cur = g.neighbors(cur).find(|&w| to_y[w] == want).expect("BFS predecessor exists");
        path.push(cur);
    }
    Ok(path)
}
