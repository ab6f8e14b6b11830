use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{critical_structure, is_diameter_k_critical, CriticalStructure};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};

/// All triangles as sorted triples, in lexicographic order.
pub fn triangles(g: &Graph) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for (a, b) in g.edges() {
        let common: Vec<u64> = g.row(a).iter().zip(g.row(b)).map(|(x, y)| x & y).collect();
        for c in crate::bits::ones(&common).filter(|&c| c > b) {
            out.push([a, b, c]);
        }
    }
    out.sort_unstable();
    out
}

fn check_triangle(g: &Graph, t: [usize; 3]) -> Result<[usize; 3]> {
    let [a, b, c] = t;
    for v in t {
        if v >= g.n() {
            return Err(Error::OutOfRange { vertex: v, n: g.n() });
        }
    }
    if !(g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c)) {
        return Err(Error::NotATriangle(a, b, c));
    }
    let mut s = t;
    s.sort_unstable();
    Ok(s)
}

/// Vertices `v ∉ T` for which some `v x y` with `x, y ∈ T` is the critical
/// path of `{v, y}` and is associated with `xy`. `s` must be the 2-critical
/// structure of `g`.
pub fn feet(g: &Graph, s: &CriticalStructure, t: [usize; 3]) -> Result<Vec<usize>> {
    let t = check_triangle(g, t)?;
    let mut out = Vec::new();
    for v in 0..g.n() {
        if t.contains(&v) {
            continue;
        }
        let is_foot = t.iter().any(|&x| {
            g.has_edge(v, x)
                && t.iter().any(|&y| {
                    y != x
                        && s.lookup(v, y).is_some_and(|r| {
                            let e = g.edge_id(x, y).expect("triangle edge");
                            r.len() == 2 && r.path[1] == x && r.is_associated(e)
                        })
                })
        });
        if is_foot {
            out.push(v);
        }
    }
    Ok(out)
}

/// The triples `{v, y, z}` with `v` a foot, `y, z ∈ T`, and `v` adjacent to
/// neither; each is sorted.
pub fn feet_triples(g: &Graph, s: &CriticalStructure, t: [usize; 3]) -> Result<Vec<[usize; 3]>> {
    let t = check_triangle(g, t)?;
    let mut out = Vec::new();
    for v in feet(g, s, t)? {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let (y, z) = (t[i], t[j]);
            if !g.has_edge(v, y) && !g.has_edge(v, z) {
                let mut tr = [v, y, z];
                tr.sort_unstable();
                out.push(tr);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Outside vertices of length-2 critical paths associated with `e`,
/// optionally restricted to a vertex subset.
pub fn arms(g: &Graph, s: &CriticalStructure, e: EdgeId, within: Option<&[bool]>) -> Vec<usize> {
    let (u, v) = g.endpoints(e);
    let mut out: Vec<usize> = s
        .associated_with(e)
        .iter()
        .map(|&i| s.record(i))
        .filter(|r| r.len() == 2)
        .map(|r| {
            let (a, b) = r.pair;
            if a == u || a == v {
                b
            } else {
                a
            }
        })
        .filter(|&w| w != u && w != v)
        .filter(|&w| within.is_none_or(|mask| mask[w]))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Per-instance foot statistics for a diameter-2-critical graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeetCensus {
    pub triangles: u64,
    /// Triangles with at least three feet.
    pub t3_star: u64,
    /// Σ over triangles of the number of foot triples.
    pub foot_triples: u64,
    pub min_feet: Option<usize>,
    pub t1: u64,
}

impl FeetCensus {
    /// `|𝒯₁| ≥ Σ|ℱ(T)| ≥ 2|𝒯₃| + |𝒯₃*|`.
    pub fn chain_holds(&self) -> bool {
        self.t1 >= self.foot_triples && self.foot_triples >= 2 * self.triangles + self.t3_star
    }
}

/// Computes feet for every triangle, checking along the way that each
/// triangle has at least two feet, each foot sees exactly one triangle
/// vertex, and foot-triple sets of distinct triangles are disjoint.
pub fn feet_census(g: &Graph) -> Result<FeetCensus> {
    let verdict = is_diameter_k_critical(g, 2);
    if !verdict.is_critical() {
        return Err(Error::PreconditionFailed(format!("not diameter-2-critical: {verdict:?}")));
    }
    let s = critical_structure(g, 2);
    let tris = triangles(g);
    let mut seen: HashSet<[usize; 3]> = HashSet::new();
    let mut census = FeetCensus {
        triangles: tris.len() as u64,
        t3_star: 0,
        foot_triples: 0,
        min_feet: None,
        t1: crate::stats::triple_counts(g)?.t1,
    };
    for t in tris {
        let fs = feet(g, &s, t)?;
        if fs.len() < 2 {
            return Err(Error::LemmaViolation(format!("triangle {t:?} has {} feet", fs.len())));
        }
        for &v in &fs {
            let adj = t.iter().filter(|&&x| g.has_edge(v, x)).count();
            if adj != 1 {
                return Err(Error::LemmaViolation(format!(
                    "foot {v} of {t:?} is adjacent to {adj} triangle vertices"
                )));
            }
        }
        if fs.len() >= 3 {
            census.t3_star += 1;
        }
        census.min_feet = Some(census.min_feet.map_or(fs.len(), |m| m.min(fs.len())));
        for tr in feet_triples(g, &s, t)? {
            if !seen.insert(tr) {
                return Err(Error::LemmaViolation(format!("foot triple {tr:?} charged twice")));
            }
            census.foot_triples += 1;
        }
    }
    if !census.chain_holds() {
        return Err(Error::LemmaViolation(format!("foot-triple chain fails: {census:?}")));
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;

    #[test]
    fn arms_examples() {
        let c5 = Graph::cycle(5).unwrap();
        let s = critical_structure(&c5, 2);
        let e = c5.edge_id(0, 1).unwrap();
        assert_eq!(arms(&c5, &s, e, None), vec![2, 4]);
        assert!(arms(&c5, &s, e, Some(&[false; 5])).is_empty());

        let k23 = Graph::complete_bipartite(2, 3);
        let s = critical_structure(&k23, 2);
        for e in k23.edge_ids() {
            assert!(arms(&k23, &s, e, None).is_empty());
        }
    }

    #[test]
    fn arms_are_not_adjacent_to_far_endpoint() {
        let g = Graph::petersen();
        let s = critical_structure(&g, 2);
        for e in g.edge_ids() {
            let (u, v) = g.endpoints(e);
            for w in arms(&g, &s, e, None) {
                assert!(g.has_edge(w, u) != g.has_edge(w, v));
            }
        }
    }

    #[test]
    fn triangle_free_has_no_feet() {
        let c5 = Graph::cycle(5).unwrap();
        let census = feet_census(&c5).unwrap();
        assert_eq!(census.triangles, 0);
        assert_eq!(census.foot_triples, 0);
    }

    #[test]
    fn feet_on_d2_constructions() {
        let g = constructions::build_d2_trip(&Graph::cycle(5).unwrap(), 2).unwrap();
        let census = feet_census(&g).unwrap();
        assert!(census.triangles > 0);
        assert!(census.min_feet.unwrap() >= 2);
        assert!(census.chain_holds());
    }

    #[test]
    fn rejects_non_triangle() {
        let g = Graph::cycle(5).unwrap();
        let s = critical_structure(&g, 2);
        assert!(matches!(feet(&g, &s, [0, 1, 2]), Err(Error::NotATriangle(..))));
    }

    #[test]
    fn feet_match_definition_oracle() {
        // oracle: v is a foot iff for some x, y in T the path v x y is the
        // only (v, y)-path of length at most 2 and vy is not an edge
        let g = constructions::build_d2_bip(&Graph::cycle(5).unwrap()).unwrap();
        let s = critical_structure(&g, 2);
        for t in triangles(&g) {
            let got = feet(&g, &s, t).unwrap();
            let want: Vec<usize> = (0..g.n())
                .filter(|v| !t.contains(v))
                .filter(|&v| {
                    t.iter().any(|&x| {
                        t.iter().any(|&y| {
                            y != x
                                && g.has_edge(v, x)
                                && !g.has_edge(v, y)
                                && g.common_neighbor_count(v, y) == 1
                        })
                    })
                })
                .collect();
            assert_eq!(got, want, "{t:?}");
        }
    }
}
