use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{critical_structure, is_diameter_k_critical, CriticalStructure};
use super::feet::triangles;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metric;

/// The charging set of one triangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleCharge {
    pub triangle: [usize; 3],
    /// `x y` is the shared edge of `P₁`, `t x` its neighbor on `P₁`, `z` the
    /// third vertex.
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub t: usize,
    pub p1: Vec<usize>,
    /// Oriented `u … y z … v`.
    pub p2: Vec<usize>,
    pub p3: Vec<usize>,
    /// Sorted triples, each inducing exactly one edge.
    pub triples: Vec<[usize; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargingReport {
    pub k: u32,
    pub triangles: u64,
    pub charged_triples: u64,
    pub min_charge: Option<usize>,
    pub t1: u64,
    /// `|𝒯₁| ≥ k·|𝒯₃|`.
    pub certificate: bool,
    /// `Σd² ≤ nm`, which follows from the certificate and `Σd² − nm = 3t₃ − t₁`.
    pub degree_bound: bool,
    pub charges: Vec<TriangleCharge>,
}

fn least_path(g: &Graph, s: &CriticalStructure, a: usize, b: usize) -> Option<Vec<usize>> {
    let e = g.edge_id(a, b)?;
    s.associated_with(e).iter().map(|&i| s.record(i).path.clone()).min()
}

fn violation(t: [usize; 3], what: impl std::fmt::Display) -> Error {
    Error::ChargingViolation(format!("triangle {t:?}: {what}"))
}

fn induced_edges(g: &Graph, tr: [usize; 3]) -> usize {
    [(0, 1), (0, 2), (1, 2)]
        .iter()
        .filter(|&&(i, j)| g.has_edge(tr[i], tr[j]))
        .count()
}

fn sorted(mut tr: [usize; 3]) -> [usize; 3] {
    tr.sort_unstable();
    tr
}

/// Builds a charging set of at least `k` one-edge triples for each triangle
/// and checks that the sets are pairwise disjoint, which certifies
/// `|𝒯₁| ≥ k|𝒯₃|` and hence `Σd² ≤ nm`.
///
/// Path choices are the lexicographically least members of each `𝒫(e)`;
/// `x` is the smaller endpoint of the `P₁` edge when it has a second
/// neighbor on `P₁`.
pub fn verify_triangle_charging(g: &Graph, k: u32) -> Result<ChargingReport> {
    if k < 3 {
        return Err(Error::PreconditionFailed(format!("charging needs k >= 3, got {k}")));
    }
    let verdict = is_diameter_k_critical(g, k);
    if !verdict.is_critical() {
        return Err(Error::PreconditionFailed(format!(
            "not diameter-{k}-critical: {verdict:?}"
        )));
    }
    let s = critical_structure(g, k);
    let mut seen: HashSet<[usize; 3]> = HashSet::new();
    let mut charges = Vec::new();
    for tri in triangles(g) {
        let [a, b, c] = tri;
        let p1 = least_path(g, &s, a, b).ok_or_else(|| violation(tri, "𝒫(ab) is empty"))?;
        let p3 = least_path(g, &s, a, c).ok_or_else(|| violation(tri, "𝒫(ac) is empty"))?;
        for p in [&p1, &p3] {
            if p.len() - 1 != k as usize {
                return Err(violation(tri, format!("critical path {p:?} has length != {k}")));
            }
        }
        let pos = |p: &[usize], v: usize| p.iter().position(|&w| w == v);
        let (ia, ib) = (pos(&p1, a).unwrap(), pos(&p1, b).unwrap());
        let other_neighbor = |i: usize, j: usize| -> Option<usize> {
            // the P1-neighbor of p1[i] that is not p1[j]
            let cand = if j == i + 1 { i.checked_sub(1) } else { Some(i + 1) };
            cand.filter(|&c| c < p1.len()).map(|c| p1[c])
        };
        let (x, y, t) = match other_neighbor(ia, ib) {
            Some(t) => (a, b, t),
            None => (b, a, other_neighbor(ib, ia).ok_or_else(|| violation(tri, "P1 is one edge"))?),
        };
        let z = c;
        if t == z {
            return Err(violation(tri, "t equals z"));
        }
        let mut p2 = least_path(g, &s, y.min(z), y.max(z)).ok_or_else(|| violation(tri, "𝒫(yz) is empty"))?;
        if p2.len() - 1 != k as usize {
            return Err(violation(tri, format!("P2 {p2:?} has length != {k}")));
        }
        if pos(&p2, y).unwrap() > pos(&p2, z).unwrap() {
            p2.reverse();
        }
        if p2.contains(&t) || p2.contains(&x) {
            return Err(violation(tri, "P2 meets t or x"));
        }
        let iy = pos(&p2, y).unwrap();
        let e = |u: usize, v: usize| g.edge_id(u, v).expect("triangle edge");
        // (triple, the edge f' on all shortest (s, s')-paths, s, s')
        let mut planned = vec![([t, y, z], e(x, y), t, y)];
        for (i, &sv) in p2.iter().enumerate() {
            if sv == y || sv == z {
                continue;
            }
            if i < iy {
                planned.push(([sv, x, z], e(y, z), sv, z));
            } else {
                planned.push(([sv, x, y], e(z, y), sv, y));
            }
        }
        let mut triples = Vec::with_capacity(planned.len());
        for (tr, fp, sv, sp) in planned {
            if induced_edges(g, tr) != 1 {
                return Err(violation(tri, format!("{tr:?} does not induce exactly one edge")));
            }
            if !metric::edge_on_all_shortest(g, sv, sp, fp) {
                return Err(violation(tri, format!("{tr:?} lacks its forced edge")));
            }
            let tr = sorted(tr);
            if !seen.insert(tr) {
                return Err(violation(tri, format!("{tr:?} already charged to another triangle")));
            }
            triples.push(tr);
        }
        if triples.len() < k as usize {
            return Err(violation(tri, format!("only {} triples", triples.len())));
        }
        charges.push(TriangleCharge {
            triangle: tri,
            x,
            y,
            z,
            t,
            p1,
            p2,
            p3,
            triples,
        });
    }
    let counts = crate::stats::triple_counts(g)?;
    let charged = seen.len() as u64;
    if charged > counts.t1 {
        return Err(Error::ChargingViolation(format!(
            "{charged} charged triples exceed |T1| = {}",
            counts.t1
        )));
    }
    let certificate = counts.t1 >= k as u64 * counts.t3;
    let degree_bound = g.degree_square_sum() <= g.n() as u128 * g.m() as u128;
    if !certificate || !degree_bound {
        return Err(Error::ChargingViolation(format!(
            "certificate {certificate}, degree bound {degree_bound}"
        )));
    }
    Ok(ChargingReport {
        k,
        triangles: charges.len() as u64,
        charged_triples: charged,
        min_charge: charges.iter().map(|c| c.triples.len()).min(),
        t1: counts.t1,
        certificate,
        degree_bound,
        charges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;

    /// Oracle: count simple paths of length at most `max` between two vertices.
    fn paths_at_most(g: &Graph, x: usize, y: usize, max: usize) -> usize {
        crate::criticality::count_short_paths(g, x, y, max)
    }

    #[test]
    fn bipartite_is_vacuous() {
        let g = constructions::build_layered_dk(3, 1, 2, 3).unwrap();
        let r = verify_triangle_charging(&g, 3).unwrap();
        assert_eq!(r.triangles, 0);
        assert!(r.certificate);
    }

    #[test]
    fn clique_matching_charges() {
        for n in [8, 10, 12] {
            let g = constructions::build_clique_matching(n).unwrap();
            let r = verify_triangle_charging(&g, 3).unwrap();
            let h = n / 2;
            assert_eq!(r.triangles as usize, h * (h - 1) * (h - 2) / 6);
            assert!(r.min_charge.unwrap() >= 3);
            for c in &r.charges {
                // every P1 is the unique path of its length, since the
                // pendant edges pin both ends
                let (p, q) = (c.p1[0], *c.p1.last().unwrap());
                assert_eq!(paths_at_most(&g, p, q, 3), 1);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(verify_triangle_charging(&Graph::petersen(), 2).is_err());
        let g = Graph::cycle(6).unwrap().with_edge(0, 3).unwrap();
        assert!(matches!(
            verify_triangle_charging(&g, 3),
            Err(Error::PreconditionFailed(_))
        ));
    }
}
