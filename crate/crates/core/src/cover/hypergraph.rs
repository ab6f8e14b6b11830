use std::collections::HashMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::criticality::CriticalPathRecord;
use crate::error::{Error, Result};
use crate::rng;

/// A 3-edge with its center and handle, remembering the path it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge3 {
    /// Sorted.
    pub vertices: [usize; 3],
    pub center: usize,
    pub handle: usize,
    pub path: Vec<usize>,
}

impl Edge3 {
    fn shared(&self, other: &Edge3) -> usize {
        self.vertices.iter().filter(|v| other.vertices.contains(v)).count()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph3 {
    pub n: usize,
    pub edges: Vec<Edge3>,
    /// Part (0, 1, 2) of each vertex, when 3-partite.
    pub parts: Option<Vec<u8>>,
}

impl Hypergraph3 {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Every two 3-edges share at most one vertex.
    pub fn is_linear(&self) -> bool {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            let [a, b, c] = e.vertices;
            for pair in [(a, b), (a, c), (b, c)] {
                if seen.insert(pair, i).is_some() {
                    return false;
                }
            }
        }
        true
    }

    /// Each 3-edge meets each part exactly once.
    pub fn is_three_partite(&self) -> bool {
        self.parts.as_ref().is_some_and(|p| {
            self.edges.iter().all(|e| {
                let mut hit = [false; 3];
                e.vertices.iter().for_each(|&v| hit[p[v] as usize] = true);
                hit == [true; 3]
            })
        })
    }

    /// Three 3-edges pairwise meeting in one vertex, the three meeting
    /// points distinct: `{1,2,3}, {3,4,5}, {5,6,1}`. Exhaustive over triples.
    pub fn find_triangle(&self) -> Option<[usize; 3]> {
        let es = &self.edges;
        let meet = |i: usize, j: usize| -> Option<usize> {
            let common: Vec<usize> = es[i].vertices.iter().copied().filter(|v| es[j].vertices.contains(v)).collect();
            (common.len() == 1).then(|| common[0])
        };
        for i in 0..es.len() {
            for j in i + 1..es.len() {
                let Some(a) = meet(i, j) else { continue };
                for k in j + 1..es.len() {
                    if let (Some(b), Some(c)) = (meet(j, k), meet(i, k)) {
                        if a != b && b != c && a != c {
                            return Some([i, j, k]);
                        }
                    }
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperReport {
    pub t: u64,
    pub seed: u64,
    pub h1: usize,
    pub h2: usize,
    pub h3: usize,
    pub h4: usize,
    /// Largest number of other H1 edges meeting one H1 edge in two vertices.
    pub h1_max_overlap: usize,
    pub partition_attempts: u32,
    /// `(handle part, center part)` of the class kept in H4.
    pub h4_class: Option<(u8, u8)>,
    pub h2_linear: bool,
    pub h2_bound: bool,
    pub h3_partite_linear: bool,
    pub h3_bound: bool,
    pub h4_bound: bool,
    pub h4_linear: bool,
    pub h4_triangle_free: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperChain {
    pub h1: Hypergraph3,
    pub h2: Hypergraph3,
    pub h3: Hypergraph3,
    pub h4: Hypergraph3,
    pub report: HyperReport,
}

/// Partitions tried before giving up on the `2/9` bound.
pub const MAX_PARTITIONS: u32 = 10_000;

fn bound(what: impl Into<String>) -> Error {
    Error::BoundViolation(what.into())
}

/// The chain `H1 → H4` built from the paths of `𝒫_t` on `n` vertices.
///
/// H1 takes `{x, a, y}` from each path `x a b y` (center `a`, handle `x`).
/// H2 is the greedy linear subfamily in H1 order. H3 keeps the H2 edges that
/// are rainbow under a random 3-partition (vertex `v` gets `gen_range(0..3)`
/// from the stream seeded with `seed + attempt`), retried until
/// `9|H3| ≥ 2|H2|`. H4 keeps the largest `(handle part, center part)` class,
/// the first in lexicographic order on ties.
pub fn hypergraph_chain(n: usize, p_t: &[CriticalPathRecord], t: u64, seed: u64) -> Result<HyperChain> {
    let mut h1 = Hypergraph3 { n, ..Default::default() };
    for r in p_t {
        let p = &r.path;
        if p.len() != 4 {
            return Err(Error::PreconditionFailed(format!("{p:?} is not a length-3 path")));
        }
        let (x, a, y) = (p[0], p[1], p[3]);
        let mut vertices = [x, a, y];
        vertices.sort_unstable();
        h1.edges.push(Edge3 {
            vertices,
            center: a,
            handle: x,
            path: p.clone(),
        });
    }
    let h1_max_overlap = (0..h1.len())
        .map(|i| (0..h1.len()).filter(|&j| j != i && h1.edges[i].shared(&h1.edges[j]) == 2).count())
        .max()
        .unwrap_or(0);
    if t >= 1 && h1_max_overlap as u64 > 2 * t - 2 {
        return Err(bound(format!("an H1 edge meets {h1_max_overlap} others in two vertices, t = {t}")));
    }

    let mut h2 = Hypergraph3 { n, ..Default::default() };
    let mut alive = vec![true; h1.len()];
    for i in 0..h1.len() {
        if !alive[i] {
            continue;
        }
        h2.edges.push(h1.edges[i].clone());
        for j in i + 1..h1.len() {
            if h1.edges[i].shared(&h1.edges[j]) >= 2 {
                alive[j] = false;
            }
        }
    }
    let h2_linear = h2.is_linear();
    let h2_bound = 2 * t as u128 * h2.len() as u128 >= h1.len() as u128;

    let mut attempts = 0;
    let h3 = loop {
        attempts += 1;
        let mut r = rng::seeded(seed.wrapping_add(attempts as u64 - 1));
        let parts: Vec<u8> = (0..n).map(|_| r.gen_range(0..3u8)).collect();
        let edges: Vec<Edge3> = h2
            .edges
            .iter()
            .filter(|e| {
                let mut hit = [false; 3];
                e.vertices.iter().for_each(|&v| hit[parts[v] as usize] = true);
                hit == [true; 3]
            })
            .cloned()
            .collect();
        if 9 * edges.len() >= 2 * h2.len() {
            break Hypergraph3 {
                n,
                edges,
                parts: Some(parts),
            };
        }
        if attempts >= MAX_PARTITIONS {
            return Err(bound(format!("no partition reached 2/9 of {} edges", h2.len())));
        }
    };
    let h3_partite_linear = h3.is_three_partite() && h3.is_linear();
    let h3_bound = 9 * h3.len() >= 2 * h2.len();

    let parts = h3.parts.clone().expect("partitioned");
    let mut classes: Vec<((u8, u8), Vec<Edge3>)> = Vec::new();
    for hp in 0..3u8 {
        for cp in (0..3u8).filter(|&c| c != hp) {
            let es = h3
                .edges
                .iter()
                .filter(|e| parts[e.handle] == hp && parts[e.center] == cp)
                .cloned()
                .collect();
            classes.push(((hp, cp), es));
        }
    }
    let best = classes.iter().map(|(_, es)| es.len()).max().unwrap_or(0);
    let (class, h4_edges) = classes.into_iter().find(|(_, es)| es.len() == best).expect("six classes");
    let h4 = Hypergraph3 {
        n,
        edges: h4_edges,
        parts: Some(parts),
    };
    let report = HyperReport {
        t,
        seed,
        h1: h1.len(),
        h2: h2.len(),
        h3: h3.len(),
        h4: h4.len(),
        h1_max_overlap,
        partition_attempts: attempts,
        h4_class: (!h3.is_empty()).then_some(class),
        h2_linear,
        h2_bound,
        h3_partite_linear,
        h3_bound,
        h4_bound: 6 * h4.len() >= h3.len(),
        h4_linear: h4.is_linear(),
        h4_triangle_free: h4.find_triangle().is_none(),
    };
    let ok = report.h2_linear
        && report.h2_bound
        && report.h3_partite_linear
        && report.h3_bound
        && report.h4_bound
        && report.h4_linear
        && report.h4_triangle_free;
    if !ok {
        return Err(bound(format!("{report:?}")));
    }
    Ok(HyperChain { h1, h2, h3, h4, report })
}
