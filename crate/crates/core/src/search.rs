//! Searches for extremal diameter-critical graphs: exhaustive enumeration up
//! to 8 vertices and seeded hill-climbing beyond.
//!
//! Small graphs are handled as `u16` adjacency rows with their own BFS and
//! criticality test; every reported witness is re-checked by
//! [`is_diameter_k_critical`] before it is emitted.

use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions;
use crate::criticality::{critical_edge_flags, is_diameter_k_critical};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::metric;
use crate::rng;

/// Largest `n` for exhaustive enumeration.
pub const MAX_EXHAUSTIVE_N: usize = 8;
/// Largest `n` for local search.
pub const MAX_LOCAL_N: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Small {
    n: usize,
    rows: [u16; MAX_EXHAUSTIVE_N],
}

fn pairs(n: usize) -> usize {
    n * (n.saturating_sub(1)) / 2
}

impl Small {
    /// Pairs are read column by column, `(0,1), (0,2), (1,2), (0,3), …`,
    /// the first pair in the most significant bit.
    fn from_code(n: usize, code: u32) -> Small {
        let total = pairs(n);
        let mut rows = [0u16; MAX_EXHAUSTIVE_N];
        let mut idx = 0;
        for q in 1..n {
            for p in 0..q {
                if code >> (total - 1 - idx) & 1 == 1 {
                    rows[p] |= 1 << q;
                    rows[q] |= 1 << p;
                }
                idx += 1;
            }
        }
        Small { n, rows }
    }

    fn adj(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    fn with_vertex(&self, nbrs: u16) -> Small {
        let mut s = *self;
        let v = s.n;
        s.n += 1;
        s.rows[v] = nbrs;
        for u in 0..v {
            if nbrs >> u & 1 == 1 {
                s.rows[u] |= 1 << v;
            }
        }
        s
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.adj(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Least code over all orderings of the vertices by nondecreasing degree.
    fn canonical(&self) -> u32 {
        let n = self.n;
        let total = pairs(n);
        if total == 0 {
            return 0;
        }
        let deg: Vec<u32> = (0..n).map(|v| self.rows[v].count_ones()).collect();
        let mut sorted = deg.clone();
        sorted.sort_unstable();
        let mut best = u32::MAX;
        let mut order = [0usize; MAX_EXHAUSTIVE_N];
        self.canon_rec(0, 0, 0, &deg, &sorted, total, &mut order, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn canon_rec(
        &self,
        q: usize,
        prefix: u32,
        used: u16,
        deg: &[u32],
        sorted: &[u32],
        total: usize,
        order: &mut [usize; MAX_EXHAUSTIVE_N],
        best: &mut u32,
    ) {
        if q == self.n {
            *best = (*best).min(prefix);
            return;
        }
        let placed = q * (q + 1) / 2;
        for v in 0..self.n {
            if used >> v & 1 == 1 || deg[v] != sorted[q] {
                continue;
            }
            let mut code = prefix;
            for &u in &order[..q] {
                code = code << 1 | self.adj(u, v) as u32;
            }
            if *best != u32::MAX && code > *best >> (total - placed) {
                continue;
            }
            order[q] = v;
            self.canon_rec(q + 1, code, used | 1 << v, deg, sorted, total, order, best);
        }
    }

    fn reach_within(&self, rows: &[u16], k: u32) -> bool {
        let full: u16 = if self.n == 16 { u16::MAX } else { (1 << self.n) - 1 };
        (0..self.n).all(|s| {
            let mut seen: u16 = 1 << s;
            let mut frontier = seen;
            for _ in 0..k {
                let mut next = 0;
                let mut f = frontier;
                while f != 0 {
                    next |= rows[f.trailing_zeros() as usize];
                    f &= f - 1;
                }
                frontier = next & !seen;
                seen |= next;
                if seen == full || frontier == 0 {
                    break;
                }
            }
            seen == full
        })
    }

    fn is_critical(&self, k: u32) -> bool {
        if k == 0 || !self.reach_within(&self.rows, k) || self.reach_within(&self.rows, k - 1) {
            return false;
        }
        let mut rows = self.rows;
        self.edges().into_iter().all(|(u, v)| {
            rows[u] &= !(1 << v);
            rows[v] &= !(1 << u);
            let broken = !self.reach_within(&rows, k);
            rows[u] |= 1 << v;
            rows[v] |= 1 << u;
            broken
        })
    }

    fn to_graph(&self) -> Graph {
        Graph::build(self.n, self.edges()).expect("valid small graph")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Edges,
    Ratio,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub graph6: String,
    pub m: usize,
    pub degree_square_sum: u128,
    /// `Σd² / (nm)`.
    pub ratio: Ratio<u128>,
}

impl Witness {
    fn of(g: &Graph) -> Witness {
        Witness {
            graph6: g.to_graph6(),
            m: g.m(),
            degree_square_sum: g.degree_square_sum(),
            ratio: ratio(g),
        }
    }
}

fn ratio(g: &Graph) -> Ratio<u128> {
    let nm = g.n() as u128 * g.m() as u128;
    if nm == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(g.degree_square_sum(), nm)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    pub k: u32,
    pub mode: Mode,
    pub objective: Option<Objective>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    /// Diameter-`k`-critical graphs up to isomorphism (exhaustive mode).
    pub count: Option<usize>,
    pub best_m: Option<usize>,
    pub best_ratio: Option<Ratio<u128>>,
    pub best_ratio_decimal: Option<f64>,
    pub max_edge_witnesses: Vec<Witness>,
    pub max_ratio_witnesses: Vec<Witness>,
    /// Every graph found, canonical graph6 (exhaustive mode).
    pub graphs: Vec<String>,
    pub accepted_moves: u64,
    /// Verified graphs beyond `n²/4` at `k = 2`.
    pub alarms: Vec<String>,
}

impl SearchResult {
    fn from_graphs(n: usize, k: u32, mode: Mode, graphs: &[Graph]) -> SearchResult {
        let best_m = graphs.iter().map(Graph::m).max();
        let best_ratio = graphs.iter().map(ratio).max();
        let pick = |keep: &dyn Fn(&Graph) -> bool| graphs.iter().filter(|g| keep(g)).map(Witness::of).collect();
        SearchResult {
            n,
            k,
            mode,
            objective: None,
            seed: None,
            budget: None,
            count: None,
            best_m,
            best_ratio,
            best_ratio_decimal: best_ratio.map(|r| *r.numer() as f64 / *r.denom() as f64),
            max_edge_witnesses: pick(&|g| Some(g.m()) == best_m),
            max_ratio_witnesses: pick(&|g| Some(ratio(g)) == best_ratio),
            graphs: Vec::new(),
            accepted_moves: 0,
            alarms: Vec::new(),
        }
    }
}

/// All graphs on `n ≤ 8` vertices up to isomorphism, as canonical codes, by
/// adding one vertex at a time to every class on `n − 1` vertices.
fn classes_by_augmentation(n: usize) -> Vec<u32> {
    let mut level = vec![0u32];
    for size in 2..=n {
        let prev = size - 1;
        let mut next: Vec<u32> = level
            .par_iter()
            .flat_map_iter(|&c| {
                let s = Small::from_code(prev, c);
                (0..1u16 << prev).map(move |nb| s.with_vertex(nb).canonical())
            })
            .collect();
        next.par_sort_unstable();
        next.dedup();
        level = next;
    }
    level
}

fn critical_by_brute_force(n: usize, k: u32) -> Vec<u32> {
    let mut out: Vec<u32> = (0..1u32 << pairs(n))
        .into_par_iter()
        .filter_map(|code| {
            let s = Small::from_code(n, code);
            s.is_critical(k).then(|| s.canonical())
        })
        .collect();
    out.par_sort_unstable();
    out.dedup();
    out
}

fn critical_by_augmentation(n: usize, k: u32) -> Vec<u32> {
    let base = classes_by_augmentation(n - 1);
    let mut out: Vec<u32> = base
        .par_iter()
        .flat_map_iter(|&c| {
            let s = Small::from_code(n - 1, c);
            (0..1u16 << (n - 1)).filter_map(move |nb| {
                let t = s.with_vertex(nb);
                t.is_critical(k).then(|| t.canonical())
            })
        })
        .collect();
    out.par_sort_unstable();
    out.dedup();
    out
}

/// Every diameter-`k`-critical graph on `n` vertices, up to isomorphism.
///
/// `n ≤ 7` scans all labeled graphs; `n = 8` extends every 7-vertex class by
/// one vertex. For `k = 2` a maximum above `⌊n²/4⌋` aborts with the witness.
pub fn enumerate_critical(n: usize, k: u32) -> Result<SearchResult> {
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::TooLarge { n, max: MAX_EXHAUSTIVE_N });
    }
    if n == 0 || k == 0 {
        return Err(Error::BadParams("enumeration needs n >= 1 and k >= 1".into()));
    }
    let codes = if n <= 7 {
        critical_by_brute_force(n, k)
    } else {
        critical_by_augmentation(n, k)
    };
    let graphs: Vec<Graph> = codes.iter().map(|&c| Small::from_code(n, c).to_graph()).collect();
    for g in &graphs {
        let v = is_diameter_k_critical(g, k);
        if !v.is_critical() {
            return Err(Error::InternalInvariant {
                iteration: 0,
                detail: format!("enumerated {} is not diameter-{k}-critical: {v:?}", g.to_graph6()),
            });
        }
    }
    let mut r = SearchResult::from_graphs(n, k, Mode::Exhaustive, &graphs);
    r.count = Some(graphs.len());
    r.graphs = graphs.iter().map(Graph::to_graph6).collect();
    if k == 2 {
        if let Some(w) = r.max_edge_witnesses.iter().find(|w| 4 * w.m > n * n) {
            return Err(Error::TheoremViolation(format!(
                "diameter-2-critical {} has {} > n^2/4 edges",
                w.graph6, w.m
            )));
        }
    }
    Ok(r)
}

/// Canonical graph6 of a graph on at most 8 vertices: the labeling with the
/// least adjacency bit string among degree-sorted orderings.
pub fn canonical_graph6(g: &Graph) -> Result<String> {
    if g.n() > MAX_EXHAUSTIVE_N {
        return Err(Error::TooLarge {
            n: g.n(),
            max: MAX_EXHAUSTIVE_N,
        });
    }
    let mut rows = [0u16; MAX_EXHAUSTIVE_N];
    for (u, v) in g.edges() {
        rows[u] |= 1 << v;
        rows[v] |= 1 << u;
    }
    let s = Small { n: g.n(), rows };
    Ok(Small::from_code(g.n(), s.canonical()).to_graph().to_graph6())
}

/// The construction a local search starts from.
pub fn seed_graph(n: usize, k: u32) -> Result<Graph> {
    let bad = || Error::BadParams(format!("no seed construction for n = {n}, k = {k}"));
    match k {
        2 if n >= 10 => {
            let c5 = Graph::cycle(5)?;
            constructions::build_d2_trip(&c5, n - 10)
        }
        2 if n >= 3 => Ok(Graph::complete_bipartite(1, n - 1)),
        3 if n >= 6 && n % 2 == 0 => constructions::build_clique_matching(n),
        k if k >= 3 && n > k as usize => {
            let span = k as usize - 1;
            let mut b = (n as f64 / (2.0 * span as f64)).round().max(1.0) as usize;
            while b > 1 && 1 + b * span >= n {
                b -= 1;
            }
            let c = n.checked_sub(1 + b * span).filter(|&c| c >= 1).ok_or_else(bad)?;
            constructions::build_layered_dk(k as usize, 1, b, c)
        }
        _ => Err(bad()),
    }
}

fn score(g: &Graph, objective: Objective) -> (Ratio<u128>, Ratio<u128>) {
    let m = Ratio::from_integer(g.m() as u128);
    match objective {
        Objective::Edges => (m, ratio(g)),
        Objective::Ratio => (ratio(g), m),
    }
}

fn random_non_edge(g: &Graph, r: &mut rng::Rng) -> Option<(usize, usize)> {
    let n = g.n();
    if g.m() == pairs(n) {
        return None;
    }
    loop {
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        if u != v && !g.has_edge(u, v) {
            return Some((u.min(v), u.max(v)));
        }
    }
}

/// Deletes non-critical edges, one at a time and chosen at random, until
/// every edge is critical. Deleting a non-critical edge keeps the diameter.
fn repair(mut g: Graph, k: u32, r: &mut rng::Rng) -> Graph {
    loop {
        let flags = critical_edge_flags(&g, k);
        let loose: Vec<usize> = (0..flags.len()).filter(|&i| !flags[i]).collect();
        if loose.is_empty() {
            return g;
        }
        let e = loose[r.gen_range(0..loose.len())];
        g = g.without_edge(EdgeId(e));
    }
}

/// Seeded hill-climbing from [`seed_graph`]. Each of `budget` proposals adds
/// a random non-edge, or (with probability ½) also deletes a random edge;
/// proposals whose diameter is not `k` are rejected, the rest are repaired
/// by deletions and accepted when the objective does not decrease.
pub fn local_search(n: usize, k: u32, objective: Objective, seed: u64, budget: u64) -> Result<SearchResult> {
    if n > MAX_LOCAL_N {
        return Err(Error::TooLarge { n, max: MAX_LOCAL_N });
    }
    let mut g = seed_graph(n, k)?;
    let mut r = rng::seeded(seed);
    let mut alarms = Vec::new();
    let mut accepted = 0;
    let gate = |g: &Graph, alarms: &mut Vec<String>| -> Result<()> {
        let v = is_diameter_k_critical(g, k);
        if !v.is_critical() {
            return Err(Error::InternalInvariant {
                iteration: 0,
                detail: format!("search state {} failed verification: {v:?}", g.to_graph6()),
            });
        }
        let (m, n2) = (g.m() as u128, (g.n() as u128).pow(2));
        if k >= 3 && k as u128 * m > 3 * n2 {
            return Err(Error::TheoremViolation(format!(
                "diameter-{k}-critical {} has {m} > 3n^2/k edges",
                g.to_graph6()
            )));
        }
        if k == 2 && 4 * m > n2 {
            alarms.push(format!("{} has {m} > n^2/4 edges", g.to_graph6()));
        }
        Ok(())
    };
    gate(&g, &mut alarms)?;
    for _ in 0..budget {
        let Some((u, v)) = random_non_edge(&g, &mut r) else { break };
        let mut cand = g.with_edge(u, v)?;
        if r.gen_bool(0.5) && g.m() > 0 {
            let old = EdgeId(r.gen_range(0..g.m()));
            let (a, b) = g.endpoints(old);
            let drop = cand.edge_id(a, b).expect("old edge survives");
            cand = cand.without_edge(drop);
        }
        if metric::diameter(&cand) != k {
            continue;
        }
        let cand = repair(cand, k, &mut r);
        if score(&cand, objective) >= score(&g, objective) {
            gate(&cand, &mut alarms)?;
            if cand != g {
                accepted += 1;
            }
            g = cand;
        }
    }
    let mut res = SearchResult::from_graphs(n, k, Mode::Local, std::slice::from_ref(&g));
    res.objective = Some(objective);
    res.seed = Some(seed);
    res.budget = Some(budget);
    res.accepted_moves = accepted;
    let unique: BTreeSet<String> = alarms.into_iter().collect();
    res.alarms = unique.into_iter().collect();
    Ok(res)
}

/// Independent runs with seeds `seed, seed + 1, …`, in parallel; the best
/// by the objective wins, the lowest seed on ties.
pub fn local_search_restarts(
    n: usize,
    k: u32,
    objective: Objective,
    seed: u64,
    budget: u64,
    restarts: u64,
) -> Result<SearchResult> {
    let runs: Vec<SearchResult> = (0..restarts.max(1))
        .into_par_iter()
        .map(|i| local_search(n, k, objective, seed.wrapping_add(i), budget))
        .collect::<Result<_>>()?;
    let key = |r: &SearchResult| {
        let m = Ratio::from_integer(r.best_m.unwrap_or(0) as u128);
        let q = r.best_ratio.unwrap_or_default();
        match objective {
            Objective::Edges => (m, q),
            Objective::Ratio => (q, m),
        }
    };
    let mut best = runs[0].clone();
    for r in &runs[1..] {
        if key(r) > key(&best) {
            best = r.clone();
        }
    }
    best.seed = Some(seed);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(g: &Graph) -> Small {
        let mut rows = [0u16; MAX_EXHAUSTIVE_N];
        for (u, v) in g.edges() {
            rows[u] |= 1 << v;
            rows[v] |= 1 << u;
        }
        Small { n: g.n(), rows }
    }

    #[test]
    fn code_round_trip() {
        let g = Graph::cycle(6).unwrap();
        let s = small(&g);
        let mut code = 0u32;
        let total = pairs(6);
        let mut idx = 0;
        for q in 1..6 {
            for p in 0..q {
                if s.adj(p, q) {
                    code |= 1 << (total - 1 - idx);
                }
                idx += 1;
            }
        }
        assert_eq!(Small::from_code(6, code), s);
    }

    #[test]
    fn small_criticality_matches_verifier() {
        for n in 1..=5 {
            for code in 0..1u32 << pairs(n) {
                let s = Small::from_code(n, code);
                let g = s.to_graph();
                for k in 1..=4 {
                    assert_eq!(s.is_critical(k), is_diameter_k_critical(&g, k).is_critical(), "{code} {k}");
                }
            }
        }
    }

    #[test]
    fn graph_counts_up_to_isomorphism() {
        let counts: Vec<usize> = (1..=6).map(|n| classes_by_augmentation(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34, 156]);
    }

    #[test]
    fn brute_force_and_augmentation_agree() {
        for n in 2..=6 {
            for k in 1..=3 {
                assert_eq!(critical_by_brute_force(n, k), critical_by_augmentation(n, k), "{n} {k}");
            }
        }
    }

    #[test]
    fn small_enumerations() {
        let r = enumerate_critical(4, 2).unwrap();
        assert_eq!(r.best_m, Some(4));
        assert_eq!(r.max_edge_witnesses.len(), 1);
        assert_eq!(
            r.max_edge_witnesses[0].graph6,
            canonical_graph6(&Graph::complete_bipartite(2, 2)).unwrap()
        );
        let r = enumerate_critical(5, 2).unwrap();
        assert_eq!(r.best_m, Some(6));
        let k23 = canonical_graph6(&Graph::complete_bipartite(2, 3)).unwrap();
        assert!(r.max_edge_witnesses.iter().any(|w| w.graph6 == k23));
        let r = enumerate_critical(3, 2).unwrap();
        assert_eq!(r.graphs, vec![canonical_graph6(&Graph::path(3)).unwrap()]);
        assert!(matches!(enumerate_critical(9, 2), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn canonical_is_relabeling_invariant() {
        let g = Graph::petersen();
        assert!(canonical_graph6(&g).is_err());
        let g = Graph::build(7, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 6)]).unwrap();
        let h = g.relabel(&[6, 2, 4, 0, 1, 5, 3]).unwrap();
        assert_eq!(canonical_graph6(&g).unwrap(), canonical_graph6(&h).unwrap());
        assert_ne!(canonical_graph6(&g).unwrap(), canonical_graph6(&Graph::path(7)).unwrap());
    }

    #[test]
    fn seeds_are_critical() {
        for (n, k) in [(5, 2), (12, 2), (20, 3), (9, 3), (12, 4), (5, 4)] {
            let g = seed_graph(n, k).unwrap();
            assert_eq!(g.n(), n);
            assert!(is_diameter_k_critical(&g, k).is_critical(), "{n} {k}");
        }
        assert!(seed_graph(4, 4).is_err());
    }

    #[test]
    fn zero_budget_returns_seed() {
        let r = local_search(20, 3, Objective::Edges, 1, 0).unwrap();
        let seed = constructions::build_clique_matching(20).unwrap();
        assert_eq!(r.best_m, Some(seed.m()));
        assert_eq!(r.max_edge_witnesses[0].graph6, seed.to_graph6());
    }

    #[test]
    fn local_search_is_deterministic_and_monotone() {
        let a = local_search(12, 2, Objective::Edges, 5, 60).unwrap();
        let b = local_search(12, 2, Objective::Edges, 5, 60).unwrap();
        assert_eq!(a, b);
        let seed_m = seed_graph(12, 2).unwrap().m();
        assert!(a.best_m.unwrap() >= seed_m);
        let g = Graph::from_graph6(a.max_edge_witnesses[0].graph6.as_bytes()).unwrap();
        assert!(is_diameter_k_critical(&g, 2).is_critical());
    }
}
