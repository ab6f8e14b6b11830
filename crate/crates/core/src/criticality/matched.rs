use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::metric::{self, Bfs, UNREACHED};

/// `e` touches `x` or `y` and lies on every shortest `(x, y)`-path.
pub fn matched(g: &Graph, x: usize, y: usize, e: EdgeId) -> bool {
    let (u, v) = g.endpoints(e);
    x != y
        && (u == x || v == x || u == y || v == y)
        && metric::distance(g, x, y).is_finite()
        && metric::edge_on_all_shortest(g, x, y, e)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedCounts {
    pub k: u32,
    /// Total number of matched (pair, edge) incidences.
    pub total: u64,
    /// `pairs_by_count[c]` is the number of pairs matched with exactly `c` edges.
    pub pairs_by_count: [u64; 3],
    /// Per-edge count, indexed by edge id.
    pub edge_counts: Vec<u64>,
    pub min_edge_count: Option<u64>,
    /// `⌈k/3⌉`.
    pub required: u64,
}

impl MatchedCounts {
    /// `k·m ≤ 3n²`, the consequence of `⌈k/3⌉·m ≤ total ≤ n²`.
    pub fn edge_bound_holds(&self, n: usize) -> bool {
        self.k as u128 * self.edge_counts.len() as u128 <= 3 * (n as u128).pow(2)
    }
}

/// Counts matched incidences via one BFS per vertex: the edge `xw` is on all
/// shortest `(x, y)`-paths iff `w` is the only neighbor of `x` one step
/// closer to `y`.
///
/// Raises `CountingViolation` if a pair matches more than two edges, or, on
/// the assumption that `g` is diameter-`k`-critical, if some edge matches
/// fewer than `⌈k/3⌉` pairs.
pub fn matched_counts(g: &Graph, k: u32) -> Result<MatchedCounts> {
    let n = g.n();
    let m = g.m();
    let w = g.words();
    // for each target y: for each x != y, the edge (if any) from x's side
    let per_target: Vec<Vec<(usize, usize, u32, EdgeId)>> = (0..n)
        .into_par_iter()
        .map_init(
            || (Bfs::new(g), vec![UNREACHED; n]),
            |(bfs, dist), y| {
                bfs.run(g, y, None, UNREACHED, dist, true);
                let depth = dist.iter().filter(|&&d| d != UNREACHED).max().copied().unwrap_or(0);
                let mut levels = vec![0u64; (depth as usize + 1) * w];
                for (v, &d) in dist.iter().enumerate() {
                    if d != UNREACHED {
                        bits::set(&mut levels[d as usize * w..(d as usize + 1) * w], v);
                    }
                }
                let mut out = Vec::new();
                for x in 0..n {
                    let d = dist[x];
                    if x == y || d == UNREACHED {
                        continue;
                    }
                    let lvl = &levels[(d as usize - 1) * w..d as usize * w];
                    let row = g.row(x);
                    if bits::intersection_count(row, lvl) == 1 {
                        let nb = row.iter().zip(lvl).enumerate().find_map(|(i, (a, b))| {
                            let c = a & b;
                            (c != 0).then(|| i * 64 + c.trailing_zeros() as usize)
                        });
                        let nb = nb.expect("one closer neighbor");
                        out.push((x, y, d, g.edge_id(x, nb).expect("adjacent")));
                    }
                }
                out
            },
        )
        .collect();

    let mut per_pair: std::collections::HashMap<(usize, usize), Vec<EdgeId>> = Default::default();
    for (x, y, _d, e) in per_target.into_iter().flatten() {
        let key = (x.min(y), x.max(y));
        let entry = per_pair.entry(key).or_default();
        if !entry.contains(&e) {
            entry.push(e);
        }
    }
    let mut edge_counts = vec![0u64; m];
    let mut pairs_by_count = [0u64; 3];
    let mut total = 0u64;
    let mut matched_pairs = 0u64;
    for (pair, edges) in &per_pair {
        if edges.len() > 2 {
            return Err(Error::CountingViolation(format!(
                "pair {pair:?} matched with {} edges",
                edges.len()
            )));
        }
        pairs_by_count[edges.len()] += 1;
        matched_pairs += 1;
        for e in edges {
            edge_counts[e.0] += 1;
            total += 1;
        }
    }
    let all_pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;
    pairs_by_count[0] = all_pairs - matched_pairs;
    let required = k.div_ceil(3) as u64;
    let min_edge_count = edge_counts.iter().min().copied();
    if let Some((i, &c)) = edge_counts.iter().enumerate().find(|(_, &c)| c < required) {
        let (u, v) = g.endpoints(EdgeId(i));
        return Err(Error::CountingViolation(format!(
            "edge {u}-{v} matched with {c} pairs, fewer than {required}"
        )));
    }
    Ok(MatchedCounts {
        k,
        total,
        pairs_by_count,
        edge_counts,
        min_edge_count,
        required,
    })
}

/// A path of length `⌈k/3⌉` through `e` whose endpoints are
/// `⌈k/3⌉`-associated with `e`. Candidates are scanned by the length of the
/// part before `e`, then lexicographically; the path is returned from the
/// end on `e`'s lower endpoint side.
pub fn find_k3_associated_path(g: &Graph, k: u32, e: EdgeId) -> Result<Vec<usize>> {
    if e.0 >= g.m() {
        return Err(Error::BadParams(format!("edge {e} out of range")));
    }
    let len = k.div_ceil(3).max(1) as usize;
    let (u, v) = g.endpoints(e);
    for left_len in 0..len {
        let right_len = len - 1 - left_len;
        let mut on = vec![false; g.n()];
        on[u] = true;
        on[v] = true;
        let mut left = Vec::new();
        extend(g, u, left_len, &mut on, &mut Vec::new(), &mut left);
        for lp in left {
            for &w in &lp {
                on[w] = true;
            }
            let mut right = Vec::new();
            extend(g, v, right_len, &mut on, &mut Vec::new(), &mut right);
            for &w in &lp {
                on[w] = false;
            }
            for rp in right {
                let mut path: Vec<usize> = lp.iter().rev().copied().collect();
                path.push(u);
                path.push(v);
                path.extend(&rp);
                let (x, y) = (path[0], *path.last().unwrap());
                let bound = len as u32;
                if metric::distance(g, x, y) <= bound
                    && metric::distance_without_edge(g, x, y, e) > bound
                {
                    return Ok(path);
                }
            }
        }
    }
    Err(Error::NotFound(format!(
        "no path of length {len} through edge {u}-{v} is {len}-associated with it"
    )))
}

/// Simple paths of exactly `len` further steps from `from`, excluding
/// `from` itself, avoiding marked vertices, in lexicographic order.
fn extend(
    g: &Graph,
    from: usize,
    len: usize,
    on: &mut [bool],
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if len == 0 {
        out.push(cur.clone());
        return;
    }
    for w in g.neighbors(from) {
        if !on[w] {
            on[w] = true;
            cur.push(w);
            extend(g, w, len - 1, on, cur, out);
            cur.pop();
            on[w] = false;
        }
    }
}
