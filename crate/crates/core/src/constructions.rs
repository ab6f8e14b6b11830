//! Graph families, each with a documented vertex layout.
//!
//! | family | layout |
//! |---|---|
//! | [`build_d2_bip`] | `A = 0..n` carries `g`, `B = n..2n` carries its complement, matching `i -- n+i` |
//! | [`build_d2_trip`] | as above plus `C = 2n..2n+r`, complete to `B` |
//! | [`build_layered_dk`] | `V₀ = 0..a`, then `V₁ … V_{k−1}` of size `b`, then `V_k` of size `c`; chain `j` uses the `j`-th vertex of every middle layer |
//! | [`build_clique_matching`] | clique on `0..n/2`, matching `i -- i+n/2` |

use num_rational::Ratio;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metric;
use crate::rng;

fn check_generator(g: &Graph) -> Result<()> {
    let d = metric::diameter(g);
    if d > 2 {
        return Err(Error::PreconditionFailed(format!("diameter(g) = {d}, need <= 2")));
    }
    let dc = metric::diameter(&g.complement());
    if dc > 2 {
        return Err(Error::PreconditionFailed(format!(
            "diameter(complement(g)) = {dc}, need <= 2"
        )));
    }
    Ok(())
}

fn two_copies(g: &Graph, r: usize) -> Vec<(u32, u32)> {
    let n = g.n() as u32;
    let mut edges: Vec<(u32, u32)> = g.edges().map(|(u, v)| (u as u32, v as u32)).collect();
    for i in 0..n {
        edges.push((i, n + i));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u as usize, v as usize) {
                edges.push((n + u, n + v));
            }
        }
        for c in 0..r as u32 {
            edges.push((n + u, 2 * n + c));
        }
    }
    edges.sort_unstable();
    edges
}

/// `g` on `A`, its complement on `B`, and a perfect matching between copies.
///
/// Both `g` and its complement must have diameter at most 2. Degenerate
/// generators (`n ≤ 2`) are accepted and produce whatever they produce; the
/// verifier reports on them.
pub fn build_d2_bip(g: &Graph) -> Result<Graph> {
    build_d2_trip(g, 0)
}

/// [`build_d2_bip`] plus `r` vertices joined completely to `B`.
pub fn build_d2_trip(g: &Graph, r: usize) -> Result<Graph> {
    check_generator(g)?;
    let n = 2 * g.n() + r;
    Ok(Graph::from_sorted(n, two_copies(g, r)))
}

/// Layers `V₀ … V_k` with complete bipartite ends and `b` disjoint chains
/// through the `k − 1` middle layers. Requires `k ≥ 3` and `a, b, c ≥ 1`.
pub fn build_layered_dk(k: usize, a: usize, b: usize, c: usize) -> Result<Graph> {
    if k < 3 || a == 0 || b == 0 || c == 0 {
        return Err(Error::BadParams(format!(
            "layered construction needs k >= 3 and a, b, c >= 1; got k={k} a={a} b={b} c={c}"
        )));
    }
    let n = a + b * (k - 1) + c;
    let layer = |i: usize, j: usize| a + (i - 1) * b + j;
    let last = a + b * (k - 1);
    let mut edges = Vec::with_capacity(a * b + b * (k - 2) + b * c);
    for j in 0..b {
        for v0 in 0..a {
            edges.push((v0, layer(1, j)));
        }
        for i in 1..k - 1 {
            edges.push((layer(i, j), layer(i + 1, j)));
        }
        for vk in last..n {
            edges.push((layer(k - 1, j), vk));
        }
    }
    Graph::build(n, edges)
}

/// Clique on `0..n/2` with the matching `i -- i + n/2`. Requires even `n ≥ 6`.
pub fn build_clique_matching(n: usize) -> Result<Graph> {
    if n < 6 || n % 2 == 1 {
        return Err(Error::BadParams(format!("clique-matching needs even n >= 6, got {n}")));
    }
    let h = n / 2;
    let mut edges = Vec::with_capacity(h * (h - 1) / 2 + h);
    for u in 0..h {
        for v in u + 1..h {
            edges.push((u, v));
        }
        edges.push((u, u + h));
    }
    Graph::build(n, edges)
}

/// Calls `f(u, v)` for each edge of the `G(n, p)` sample with this seed.
///
/// Pairs are visited in lexicographic order `(0,1), (0,2), …, (n−2,n−1)`;
/// each consumes one `u64` draw and is an edge iff the draw is below
/// `⌊p·2⁶⁴⌋` (every pair is an edge when `p ≥ 1`).
pub fn for_each_gnp_edge(n: usize, p: f64, seed: u64, mut f: impl FnMut(usize, usize)) {
    let mut r = rng::seeded(seed);
    let threshold = rng::bernoulli_threshold(p);
    for u in 0..n {
        for v in u + 1..n {
            let draw = r.next_u64();
            if threshold.is_none_or(|t| draw < t) {
                f(u, v);
            }
        }
    }
}

/// Seeded Erdős–Rényi sample; see [`for_each_gnp_edge`] for the stream layout.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParams(format!("p = {p} is not a probability")));
    }
    let mut edges = Vec::new();
    for_each_gnp_edge(n, p, seed, |u, v| edges.push((u as u32, v as u32)));
    Ok(Graph::from_sorted(n, edges))
}

/// Degree sequence of the sample with this seed, without storing edges.
pub fn gnp_degrees(n: usize, p: f64, seed: u64) -> Vec<u64> {
    let mut deg = vec![0u64; n];
    for_each_gnp_edge(n, p, seed, |u, v| {
        deg[u] += 1;
        deg[v] += 1;
    });
    deg
}

/// The three events checked on a sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma23Report {
    /// `None` when the check was skipped (implicit mode beyond the size cap).
    pub diameter_at_most_2: Option<bool>,
    pub complement_diameter_at_most_2: Option<bool>,
    pub max_degree: u64,
    pub max_degree_bound_holds: bool,
}

impl Lemma23Report {
    pub fn passed(&self) -> bool {
        self.diameter_at_most_2 != Some(false)
            && self.complement_diameter_at_most_2 != Some(false)
            && self.max_degree_bound_holds
    }
}

fn degree_bound_holds(max_degree: u64, n: usize, p: f64) -> bool {
    max_degree as f64 <= 2.0 * n as f64 * p
}

/// Exact checks: `diam(g) ≤ 2`, `diam(ḡ) ≤ 2`, `Δ(g) ≤ 2np`.
pub fn check_lemma23(g: &Graph, p: f64) -> Lemma23Report {
    let max_degree = g.max_degree() as u64;
    Lemma23Report {
        diameter_at_most_2: Some(metric::diameter_at_most(g, 2)),
        complement_diameter_at_most_2: Some(complement_diameter_at_most_2(g)),
        max_degree,
        max_degree_bound_holds: degree_bound_holds(max_degree, g.n(), p),
    }
}

/// Decides `diam(ḡ) ≤ 2` without building the complement: two vertices are
/// within distance 2 in `ḡ` iff they are non-adjacent in `g` or have a common
/// non-neighbor outside the pair.
pub fn complement_diameter_at_most_2(g: &Graph) -> bool {
    use rayon::prelude::*;
    let n = g.n();
    if 2 * g.max_degree() < n.saturating_sub(2) {
        return true;
    }
    let full = crate::bits::full(n);
    (0..n).into_par_iter().all(|u| {
        g.neighbors(u).filter(|&v| v > u).all(|v| {
            // some w ∉ {u, v} adjacent to neither
            g.row(u)
                .iter()
                .zip(g.row(v))
                .zip(&full)
                .enumerate()
                .any(|(i, ((a, b), f))| {
                    let mut free = !(a | b) & f;
                    for x in [u, v] {
                        if x >> 6 == i {
                            free &= !(1u64 << (x & 63));
                        }
                    }
                    free != 0
                })
        })
    })
}

/// `p = 2·sqrt(ln n / n)`.
pub fn counterexample_p(n: usize) -> f64 {
    let n = n as f64;
    2.0 * (n.ln() / n).sqrt()
}

/// Exact statistics of the three-part construction, from the generator's
/// degree sequence alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicitStats {
    /// Generator size.
    pub n: u64,
    pub r: u64,
    /// Output size `2n + r`.
    pub vertices: u64,
    pub edges: u64,
    pub degree_square_sum: u128,
    /// `Σd² / (N·m)` as an exact fraction.
    pub ratio: Ratio<u128>,
}

impl ImplicitStats {
    /// `A`: `d + 1`; `B`: `(n − 1 − d) + 1 + r`; `C`: `n`.
    pub fn from_degrees(degrees: &[u64], r: u64) -> ImplicitStats {
        let n = degrees.len() as u64;
        let mut sq: u128 = 0;
        for &d in degrees {
            let a = (d + 1) as u128;
            let b = (n - 1 - d + 1 + r) as u128;
            sq += a * a + b * b;
        }
        sq += r as u128 * (n as u128).pow(2);
        let edges = n * n.saturating_sub(1) / 2 + n + n * r;
        let vertices = 2 * n + r;
        let den = vertices as u128 * edges as u128;
        ImplicitStats {
            n,
            r,
            vertices,
            edges,
            degree_square_sum: sq,
            ratio: if den == 0 { Ratio::from_integer(0) } else { Ratio::new(sq, den) },
        }
    }

    pub fn ratio_f64(&self) -> f64 {
        *self.ratio.numer() as f64 / *self.ratio.denom() as f64
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexampleOptions {
    /// Largest generator size materialized explicitly.
    pub n_explicit: usize,
    /// Largest generator size for which `diam(G) ≤ 2` is checked exactly in
    /// implicit mode; above this the check is reported as skipped.
    pub n_diameter_check: usize,
    pub max_attempts: u32,
    /// Force implicit mode even below `n_explicit`.
    pub force_implicit: bool,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        CounterexampleOptions {
            n_explicit: 2000,
            n_diameter_check: 30_000,
            max_attempts: 100,
            force_implicit: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub x: Ratio<u64>,
    pub r: usize,
    pub p: f64,
    pub requested_seed: u64,
    pub seed: u64,
    pub attempts: u32,
    pub explicit: bool,
    pub lemma23: Lemma23Report,
    /// The sufficient condition `2Δ < n − 2` for `diam(Ḡ) ≤ 2`.
    pub complement_certified_by_degree: bool,
    pub stats: ImplicitStats,
    /// `(p² + (2−p)² + 1) / 4.5`, the leading-order estimate at `x = 1`.
    pub closed_form_estimate: f64,
}

pub struct Counterexample {
    /// Present in explicit mode.
    pub graph: Option<Graph>,
    pub report: CounterexampleReport,
}

/// Samples `G(n, p)` with `p = 2·sqrt(ln n / n)`, resampling with seed + 1
/// until the three checks pass, then applies [`build_d2_trip`] with
/// `r = x·n`.
pub fn build_counterexample(
    n: usize,
    x: Ratio<u64>,
    seed: u64,
    opts: &CounterexampleOptions,
) -> Result<Counterexample> {
    if n < 50 {
        return Err(Error::BadParams(format!("counterexample needs n >= 50, got {n}")));
    }
    let r = x * n as u64;
    if !r.is_integer() || *x.numer() == 0 {
        return Err(Error::BadParams(format!("x = {x} must be positive with x·n integral")));
    }
    let r = r.to_integer() as usize;
    let p = counterexample_p(n);
    let explicit = n <= opts.n_explicit && !opts.force_implicit;
    for attempt in 0..opts.max_attempts {
        let s = seed.wrapping_add(attempt as u64);
        let (graph, degrees, lemma23) = if explicit || n <= opts.n_diameter_check {
            let g = sample_gnp(n, p, s)?;
            let degrees: Vec<u64> = g.degrees().into_iter().map(|d| d as u64).collect();
            let rep = check_lemma23(&g, p);
            (Some(g), degrees, rep)
        } else {
            let degrees = gnp_degrees(n, p, s);
            let max_degree = degrees.iter().copied().max().unwrap_or(0);
            let certified = 2 * max_degree < n as u64 - 2;
            let rep = Lemma23Report {
                diameter_at_most_2: None,
                complement_diameter_at_most_2: certified.then_some(true),
                max_degree,
                max_degree_bound_holds: degree_bound_holds(max_degree, n, p),
            };
            (None, degrees, rep)
        };
        if !lemma23.passed() {
            continue;
        }
        let max_degree = lemma23.max_degree;
        let stats = ImplicitStats::from_degrees(&degrees, r as u64);
        let out = match (explicit, graph) {
            (true, Some(g)) => Some(build_d2_trip(&g, r)?),
            _ => None,
        };
        return Ok(Counterexample {
            graph: out,
            report: CounterexampleReport {
                n,
                x,
                r,
                p,
                requested_seed: seed,
                seed: s,
                attempts: attempt + 1,
                explicit,
                lemma23,
                complement_certified_by_degree: 2 * max_degree < n as u64 - 2,
                stats,
                closed_form_estimate: (p * p + (2.0 - p).powi(2) + 1.0) / 4.5,
            },
        });
    }
    Err(Error::SamplingExhausted { attempts: opts.max_attempts })
}

/// Parameters of one family member, as accepted by the command line.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum ConstructionSpec {
    D2bip { generator: crate::graph::GraphJson },
    D2trip { generator: crate::graph::GraphJson, r: usize },
    Dk { k: usize, a: usize, b: usize, c: usize },
    CliqueMatching { n: usize },
    Gnp { n: usize, p: f64, seed: u64 },
    Counterexample { n: usize, x: Ratio<u64>, seed: u64 },
}

impl ConstructionSpec {
    /// The diameter the family is claimed to be critical for, if any.
    pub fn claimed_k(&self) -> Option<u32> {
        match self {
            ConstructionSpec::D2bip { .. }
            | ConstructionSpec::D2trip { .. }
            | ConstructionSpec::Counterexample { .. } => Some(2),
            ConstructionSpec::Dk { k, .. } => Some(*k as u32),
            ConstructionSpec::CliqueMatching { .. } => Some(3),
            ConstructionSpec::Gnp { .. } => None,
        }
    }
}
