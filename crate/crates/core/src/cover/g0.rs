use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{ends, CoverContext, CoverTrace, Case};
use crate::bits;
use crate::criticality::{count_short_paths, path_edge_ids, CriticalPathRecord};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::stats;

/// The pruned graph `G₀`, obtained by deleting (i) edges of multiplicity at
/// least `t` and (ii) every edge on a `t`-light 2-critical path.
#[derive(Clone, Debug)]
pub struct G0 {
    pub t: u64,
    pub graph: Graph,
    /// Indexed by edge of the original graph.
    pub kept: Vec<bool>,
    pub heavy: Vec<[usize; 2]>,
    /// Rule (ii) deletions not already removed by rule (i).
    pub light: Vec<[usize; 2]>,
    pub light_paths: Vec<Vec<usize>>,
}

fn lemma(detail: String) -> Error {
    Error::LemmaViolation(detail)
}

fn disjoint(g: &Graph, x: usize, y: usize) -> bool {
    !bits::intersects(g.row(x), g.row(y))
}

/// Builds `G₀` and checks that every length-2 2-critical path of `G` lost an
/// edge and that every critical or 2-critical pair of `G` has disjoint
/// neighborhoods in `G₀`.
pub fn build_g0(ctx: &CoverContext<'_>, t: u64) -> Result<G0> {
    if t == 0 {
        return Err(Error::BadParams("t must be positive".into()));
    }
    let g = ctx.g;
    let mut kept = vec![true; g.m()];
    let mut heavy = Vec::new();
    for e in g.edge_ids() {
        if ctx.mult[e.0].total() as u64 >= t {
            kept[e.0] = false;
            let (u, v) = g.endpoints(e);
            heavy.push([u, v]);
        }
    }
    let lights = stats::t_light_paths(g, &ctx.mult, &ctx.two, Some(t));
    let mut light = Vec::new();
    for r in &lights {
        for e in path_edge_ids(g, &r.path) {
            if kept[e.0] {
                kept[e.0] = false;
                let (u, v) = g.endpoints(e);
                light.push([u, v]);
            }
        }
    }
    light.sort_unstable();
    let graph = Graph::build(g.n(), g.edge_ids().filter(|e| kept[e.0]).map(|e| g.endpoints(e)))?;

    for r in ctx.two.iter().filter(|r| r.len() == 2) {
        if path_edge_ids(g, &r.path).iter().all(|e| kept[e.0]) {
            return Err(lemma(format!("2-critical path {:?} survives in G0", r.path)));
        }
    }
    let pairs = ctx
        .structure
        .records()
        .iter()
        .map(|r| r.pair)
        .chain(ctx.two.iter().map(|r| r.pair));
    for (x, y) in pairs {
        if !disjoint(&graph, x, y) {
            return Err(lemma(format!("pair ({x}, {y}) has a common neighbor in G0")));
        }
    }
    Ok(G0 {
        t,
        graph,
        kept,
        heavy,
        light,
        light_paths: lights.iter().map(|r| r.path.clone()).collect(),
    })
}

/// `S(i)`: the edges settled at iteration `i` that survive in `G₀`.
pub fn settled_in_g0(trace: &CoverTrace, g0: &G0) -> Vec<Vec<[usize; 2]>> {
    trace
        .iterations
        .iter()
        .map(|it| {
            it.settled
                .iter()
                .copied()
                .filter(|&[u, v]| g0.graph.has_edge(u, v))
                .collect()
        })
        .collect()
}

/// Critical paths with at least two associated edges, of length 3, whose
/// middle edge has multiplicity at least `t` and end edges less than `t`.
/// Each is checked to be the only path of length at most 3 between its ends.
pub fn extract_p_t(ctx: &CoverContext<'_>, t: u64) -> Result<Vec<CriticalPathRecord>> {
    let g = ctx.g;
    let m = |e: EdgeId| ctx.mult[e.0].total() as u64;
    let mut out = Vec::new();
    for r in ctx.structure.records() {
        if r.assoc_edges.len() < 2 || r.len() != 3 {
            continue;
        }
        let pe = r.path_edges(g);
        if m(pe[1]) >= t && m(pe[0]) < t && m(pe[2]) < t {
            let (x, y) = r.pair;
            let count = count_short_paths(g, x, y, 3);
            if count != 1 {
                return Err(lemma(format!("{:?} is one of {count} short paths", r.path)));
            }
            out.push(r.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SBoundReport {
    pub t: u64,
    pub n: usize,
    /// Number of iterations.
    pub s: usize,
    pub e_g0: usize,
    pub di_g0: u64,
    /// `Σ |P(i) ∪ P²(i)|`.
    pub union_total: usize,
    pub s_sizes: Vec<usize>,
    /// Iterations with `|S(i)| ≥ 2`; each is a (C1) iteration with its path in `𝒫_t`.
    pub exceptions: Vec<usize>,
    pub c1_in_p_t: usize,
    pub p_t: usize,
    /// `di(G₀) ≥ 2s − n/2`.
    pub inequality_9: bool,
    /// `e(G₀) ≤ s + #{(C1) iterations with path in 𝒫_t}`.
    pub edge_bound: bool,
}

/// Checks the accounting that ties the covering run to `G₀`.
pub fn verify_s_bound(
    trace: &CoverTrace,
    g0: &G0,
    p_t: &[CriticalPathRecord],
) -> Result<SBoundReport> {
    let sets = settled_in_g0(trace, g0);
    let s_sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
    let e_g0 = g0.graph.m();
    let total: usize = s_sizes.iter().sum();
    if total != e_g0 {
        return Err(lemma(format!("Σ|S(i)| = {total} but e(G0) = {e_g0}")));
    }
    let in_p_t: HashSet<&[usize]> = p_t.iter().map(|r| r.path.as_slice()).collect();
    let c1_paths: Vec<bool> = trace
        .iterations
        .iter()
        .map(|it| it.case == Case::C1 && in_p_t.contains(it.p[0].as_slice()))
        .collect();
    let mut exceptions = Vec::new();
    for (i, &size) in s_sizes.iter().enumerate() {
        if size >= 2 {
            if size > 2 || !c1_paths[i] {
                return Err(lemma(format!(
                    "iteration {} keeps {size} edges in G0 without a path in P_t",
                    i + 1
                )));
            }
            exceptions.push(i + 1);
        }
    }
    let c1_in_p_t = c1_paths.iter().filter(|&&b| b).count();

    let (_, di) = stats::disjoint_neighborhood_pairs(&g0.graph)?;
    let mut union_total = 0;
    for (i, it) in trace.iterations.iter().enumerate() {
        let pairs: HashSet<(usize, usize)> = it.p.iter().chain(&it.p2).map(|p| ends(p)).collect();
        for &(x, y) in &pairs {
            if !disjoint(&g0.graph, x, y) {
                return Err(lemma(format!("iteration {}: pair ({x}, {y}) not in Di(G0)", i + 1)));
            }
        }
        union_total += pairs.len();
    }
    if (di as usize) < union_total {
        return Err(lemma(format!("di(G0) = {di} below Σ|P(i) ∪ P²(i)| = {union_total}")));
    }
    let (s, n) = (trace.s(), trace.n);
    let inequality_9 = 2 * di as u128 >= (4 * s as u128).saturating_sub(n as u128);
    let edge_bound = e_g0 <= s + c1_in_p_t;
    if !inequality_9 || !edge_bound {
        return Err(lemma(format!(
            "di(G0) = {di}, e(G0) = {e_g0}, s = {s}, n = {n}, C1 in P_t = {c1_in_p_t}"
        )));
    }
    Ok(SBoundReport {
        t: g0.t,
        n,
        s,
        e_g0,
        di_g0: di,
        union_total,
        s_sizes,
        exceptions,
        c1_in_p_t,
        p_t: p_t.len(),
        inequality_9,
        edge_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::super::run_cover_with;
    use super::*;
    use crate::constructions;

    #[test]
    fn t_one_empties_g0() {
        let g = constructions::build_clique_matching(8).unwrap();
        let ctx = CoverContext::new(&g).unwrap();
        let g0 = build_g0(&ctx, 1).unwrap();
        assert_eq!(g0.graph.m(), 0);
        assert_eq!(g0.heavy.len(), g.m());
        let trace = run_cover_with(&ctx).unwrap();
        assert!(settled_in_g0(&trace, &g0).iter().all(Vec::is_empty));
        assert!(extract_p_t(&ctx, 1).unwrap().is_empty());
        verify_s_bound(&trace, &g0, &[]).unwrap();
    }

    #[test]
    fn huge_t_only_light_rule() {
        let g = constructions::build_clique_matching(10).unwrap();
        let ctx = CoverContext::new(&g).unwrap();
        let big = 1 + ctx.mult.iter().map(|m| m.total() as u64).max().unwrap();
        let g0 = build_g0(&ctx, big).unwrap();
        assert!(g0.heavy.is_empty());
        assert!(extract_p_t(&ctx, big).unwrap().is_empty());
    }

    /// Brute-force recheck of both deletion properties.
    fn recheck(g: &Graph, g0: &Graph) {
        for x in 0..g.n() {
            for y in x + 1..g.n() {
                let common: Vec<usize> = (0..g.n()).filter(|&w| g.has_edge(x, w) && g.has_edge(w, y)).collect();
                if !g.has_edge(x, y) && common.len() == 1 {
                    let w = common[0];
                    assert!(!(g0.has_edge(x, w) && g0.has_edge(w, y)));
                }
                let two = (g.has_edge(x, y) && common.is_empty()) || (!g.has_edge(x, y) && common.len() == 1);
                if two {
                    assert!((0..g.n()).all(|w| !(g0.has_edge(x, w) && g0.has_edge(w, y))));
                }
            }
        }
    }

    #[test]
    fn clique_matching_ten() {
        let g = constructions::build_clique_matching(10).unwrap();
        let ctx = CoverContext::new(&g).unwrap();
        let g0 = build_g0(&ctx, 3).unwrap();
        recheck(&g, &g0.graph);
        // every clique edge lies on 2 + 6 + ... paths; matching edges have
        // multiplicity 4 + 5 = 9; everything is heavy at t = 3
        assert_eq!((g0.heavy.len(), g0.light.len(), g0.graph.m()), (g.m(), 0, 0));
        let trace = run_cover_with(&ctx).unwrap();
        let p_t = extract_p_t(&ctx, 3).unwrap();
        let r = verify_s_bound(&trace, &g0, &p_t).unwrap();
        assert_eq!(r.e_g0, 0);
        assert!(r.exceptions.is_empty());
    }

    #[test]
    fn layered_p_t_is_nonempty() {
        // m(v0 a) = c + 4, m(a b) = 3c + 4, m(b y) = 2c + 3 on layered(3, 1, 1, c)
        let c = 6;
        let g = constructions::build_layered_dk(3, 1, 1, c).unwrap();
        let ctx = CoverContext::new(&g).unwrap();
        let m: Vec<usize> = ctx.mult.iter().map(|m| m.total()).collect();
        assert_eq!(m[..3], [c + 4, 3 * c + 4, 2 * c + 3]);
        let t = 2 * c as u64 + 4;
        let p_t = extract_p_t(&ctx, t).unwrap();
        assert_eq!(p_t.len(), c);
        let g0 = build_g0(&ctx, t).unwrap();
        recheck(&g, &g0.graph);
        let trace = run_cover_with(&ctx).unwrap();
        verify_s_bound(&trace, &g0, &p_t).unwrap();
    }

    #[test]
    fn p_t_uniqueness_oracle() {
        let g = constructions::build_clique_matching(10).unwrap();
        let ctx = CoverContext::new(&g).unwrap();
        for t in 1..=20 {
            for r in extract_p_t(&ctx, t).unwrap() {
                assert_eq!(count_short_paths(&g, r.pair.0, r.pair.1, 3), 1);
            }
        }
    }
}
