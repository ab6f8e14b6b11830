//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, then a
//! nonzero exit if anything failed. Every tolerance is a constant below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use diamcrit::constructions::{self, CounterexampleOptions};
use diamcrit::cover::{self, CoverContext};
use diamcrit::criticality::{find_k3_associated_path, is_diameter_k_critical, matched_counts, verify_triangle_charging};
use diamcrit::search::{canonical_graph6, enumerate_critical};
use diamcrit::stats::triple_counts;
use diamcrit::{rng, Graph};
use num_rational::Ratio;
use rand::Rng as _;

/// Labeled 7-vertex graphs sampled for the identity suite.
const IDENTITY_SAMPLE: usize = 100_000;
const IDENTITY_SEED: u64 = 20_240_601;
/// Layered tightness thresholds at n = 100 and n = 1000.
const TIGHT_100: (u128, u128) = (98, 100);
const TIGHT_1000: (u128, u128) = (998, 1000);
/// Explicit counterexample: seeds, required successes, ratio floor.
const EXPLICIT_N: usize = 2000;
const EXPLICIT_SEEDS: u64 = 10;
const EXPLICIT_REQUIRED: usize = 8;
/// Implicit counterexample band at n = 20000.
const IMPLICIT_N: usize = 20_000;
const IMPLICIT_BAND: (f64, f64) = (1.06, 1.08);
const IMPLICIT_LARGE_N: usize = 100_000;
/// 10/9, the limit of the ratio.
const LIMIT: (u128, u128) = (10, 9);
/// Cover / hypergraph seed.
const HYPER_SEED: u64 = 7;
/// Diameter-2-critical graphs on n = 3..=7 vertices up to isomorphism.
const D2_COUNTS: [usize; 5] = [1, 2, 3, 5, 10];
/// Criticality check of the 600-vertex instance.
const KERNEL_LIMIT: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn c5() -> Graph {
    Graph::cycle(5).unwrap()
}

/// Every construction instance of the suite with its claimed diameter.
fn construction_suite() -> Vec<(String, Graph, u32)> {
    let mut out = vec![("d2_bip(C5)".to_string(), constructions::build_d2_bip(&c5()).unwrap(), 2)];
    for r in [1, 2, 5] {
        out.push((format!("d2_trip(C5,{r})"), constructions::build_d2_trip(&c5(), r).unwrap(), 2));
    }
    for (k, a, b, c) in [(3, 1, 1, 10), (3, 1, 2, 3), (4, 1, 3, 5), (6, 1, 1, 14), (6, 2, 2, 8)] {
        let g = constructions::build_layered_dk(k, a, b, c).unwrap();
        out.push((format!("layered({k},{a},{b},{c})"), g, k as u32));
    }
    for n in [6, 8, 10, 20] {
        out.push((format!("clique_matching({n})"), constructions::build_clique_matching(n).unwrap(), 3));
    }
    out
}

fn counterexample_300() -> Graph {
    let opts = CounterexampleOptions::default();
    constructions::build_counterexample(300, Ratio::from_integer(1), 0, &opts)
        .unwrap()
        .graph
        .expect("explicit at n = 300")
}

fn graph_from_code(n: usize, code: u32) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if code >> bit & 1 == 1 {
                edges.push((u, v));
            }
            bit += 1;
        }
    }
    Graph::build(n, edges).unwrap()
}

fn identities() -> Outcome {
    let mut r = rng::seeded(IDENTITY_SEED);
    for _ in 0..IDENTITY_SAMPLE {
        let g = graph_from_code(7, r.gen_range(0..1u32 << 21));
        let t = triple_counts(&g).map_err(|e| format!("{}: {e}", g.to_graph6()))?;
        ensure(t.residuals(&g).all_zero(), || format!("{} residuals", g.to_graph6()))?;
    }
    let mut exhaustive = 0;
    for n in 1..=5 {
        for code in 0..1u32 << (n * (n - 1) / 2) {
            triple_counts(&graph_from_code(n, code)).map_err(|e| e.to_string())?;
            exhaustive += 1;
        }
    }
    let mut suite = construction_suite();
    suite.push(("counterexample(300)".into(), counterexample_300(), 2));
    for (name, g, _) in &suite {
        triple_counts(g).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!(
        "{IDENTITY_SAMPLE} sampled 7-vertex graphs, {exhaustive} graphs on n <= 5, {} constructions",
        suite.len()
    ))
}

fn construction_criticality() -> Outcome {
    let mut suite = construction_suite();
    suite.push(("counterexample(300)".into(), counterexample_300(), 2));
    for (name, g, k) in &suite {
        let v = is_diameter_k_critical(g, *k);
        ensure(v.is_critical(), || format!("{name}: {v:?}"))?;
    }
    Ok(format!("{} instances critical", suite.len()))
}

fn degree_upper_bound() -> Outcome {
    let mut checked = 0;
    for (name, g, k) in construction_suite().into_iter().filter(|(_, _, k)| *k >= 3) {
        ensure(is_diameter_k_critical(&g, k).is_critical(), || format!("{name} not critical"))?;
        let (sq, nm) = (g.degree_square_sum(), g.n() as u128 * g.m() as u128);
        ensure(sq <= nm, || format!("{name}: Σd² = {sq} > nm = {nm}"))?;
        checked += 1;
    }
    let mut triangles = 0;
    for n in [8, 10, 12] {
        let g = constructions::build_clique_matching(n).unwrap();
        let r = verify_triangle_charging(&g, 3).map_err(|e| e.to_string())?;
        ensure(r.certificate && r.degree_bound, || format!("clique_matching({n}) certificate"))?;
        triangles += r.triangles;
    }
    Ok(format!("Σd² <= nm on {checked} instances; charging certified {triangles} triangles"))
}

fn layered_ratio(c: usize) -> Ratio<u128> {
    let g = constructions::build_layered_dk(3, 1, 1, c).unwrap();
    let closed = 1 + 4 + (c as u128 + 1).pow(2) + c as u128;
    assert_eq!(g.degree_square_sum(), closed);
    assert_eq!(g.m(), c + 2);
    Ratio::new(closed, g.n() as u128 * g.m() as u128)
}

fn degree_tightness() -> Outcome {
    let ns = [10usize, 100, 1000];
    let ratios: Vec<Ratio<u128>> = ns.iter().map(|n| layered_ratio(n - 3)).collect();
    ensure(ratios[1] == Ratio::new(9706, 9900), || format!("n = 100 ratio {}", ratios[1]))?;
    ensure(ratios[1] >= Ratio::new(TIGHT_100.0, TIGHT_100.1), || "n = 100 below 0.98".into())?;
    ensure(ratios[2] >= Ratio::new(TIGHT_1000.0, TIGHT_1000.1), || format!("n = 1000 ratio {}", ratios[2]))?;
    ensure(ratios.windows(2).all(|w| w[0] < w[1] && w[1] < Ratio::from_integer(1)), || {
        format!("not increasing below 1: {ratios:?}")
    })?;
    Ok(format!("ratios {} , {} , {}", ratios[0], ratios[1], ratios[2]))
}

fn counterexample() -> Outcome {
    let opts = CounterexampleOptions::default();
    let x = Ratio::from_integer(1);
    let mut above = 0;
    let mut first = None;
    for seed in 0..EXPLICIT_SEEDS {
        let c = constructions::build_counterexample(EXPLICIT_N, x, seed * 1000, &opts).map_err(|e| e.to_string())?;
        let g = c.graph.as_ref().ok_or("explicit graph missing")?;
        let rep = &c.report;
        ensure(rep.lemma23.passed(), || format!("seed {seed}: Lemma 2.3 checks"))?;
        ensure(
            g.degree_square_sum() == rep.stats.degree_square_sum && g.m() as u64 == rep.stats.edges,
            || format!("seed {seed}: explicit and degree-only statistics differ"),
        )?;
        let ratio = Ratio::new(g.degree_square_sum(), g.n() as u128 * g.m() as u128);
        if ratio > Ratio::from_integer(1) {
            above += 1;
        }
        first.get_or_insert(ratio);
    }
    ensure(above >= EXPLICIT_REQUIRED, || format!("only {above}/{EXPLICIT_SEEDS} explicit ratios above 1"))?;
    let implicit = |n: usize| {
        constructions::build_counterexample(n, x, 0, &opts)
            .map(|c| c.report.stats.ratio)
            .map_err(|e| e.to_string())
    };
    let mid = implicit(IMPLICIT_N)?;
    let midf = *mid.numer() as f64 / *mid.denom() as f64;
    ensure((IMPLICIT_BAND.0..=IMPLICIT_BAND.1).contains(&midf), || format!("n = 20000 ratio {midf}"))?;
    let large = implicit(IMPLICIT_LARGE_N)?;
    let small = first.expect("ten seeds");
    let limit = Ratio::new(LIMIT.0, LIMIT.1);
    ensure(small < mid && mid < large && large < limit, || {
        format!("not increasing toward 10/9: {small} {mid} {large}")
    })?;
    let f = |r: Ratio<u128>| *r.numer() as f64 / *r.denom() as f64;
    Ok(format!(
        "{above}/{EXPLICIT_SEEDS} explicit above 1; ratios {:.4} (n=2000) {:.4} (n=20000) {:.4} (n=100000)",
        f(small),
        f(mid),
        f(large)
    ))
}

fn matched_counting() -> Outcome {
    let mut edges = 0;
    for (name, g, k) in construction_suite().into_iter().filter(|(_, _, k)| *k >= 3) {
        let mc = matched_counts(&g, k).map_err(|e| format!("{name}: {e}"))?;
        ensure(mc.min_edge_count.is_some_and(|c| c >= k.div_ceil(3) as u64), || format!("{name}: edge count"))?;
        ensure(mc.edge_bound_holds(g.n()), || format!("{name}: m > 3n²/k"))?;
        ensure(k as u128 * g.m() as u128 <= 3 * (g.n() as u128).pow(2), || format!("{name}: m bound"))?;
        for e in g.edge_ids() {
            find_k3_associated_path(&g, k, e).map_err(|err| format!("{name} edge {e}: {err}"))?;
            edges += 1;
        }
    }
    Ok(format!("counts within bounds; {edges} edges with a short associated pair"))
}

fn cover_instances() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in [8, 10, 12] {
        out.push((format!("clique_matching({n})"), constructions::build_clique_matching(n).unwrap()));
    }
    for (a, b, c) in [(1, 1, 10), (1, 2, 3), (2, 2, 2), (2, 3, 4)] {
        out.push((format!("layered(3,{a},{b},{c})"), constructions::build_layered_dk(3, a, b, c).unwrap()));
    }
    out
}

fn thresholds(n: usize) -> Vec<u64> {
    let mut ts = vec![2, 3, (n as f64).powf(2.0 / 3.0).ceil() as u64];
    ts.dedup();
    ts
}

fn cover_suite() -> Outcome {
    let mut runs = 0;
    let mut iterations = 0;
    for (name, g) in cover_instances() {
        let ctx = CoverContext::new(&g).map_err(|e| format!("{name}: {e}"))?;
        let trace = cover::run_cover_with(&ctx).map_err(|e| format!("{name}: {e}"))?;
        iterations += trace.s();
        for t in thresholds(g.n()) {
            let g0 = cover::build_g0(&ctx, t).map_err(|e| format!("{name} t={t}: {e}"))?;
            let p_t = cover::extract_p_t(&ctx, t).map_err(|e| format!("{name} t={t}: {e}"))?;
            let r = cover::verify_s_bound(&trace, &g0, &p_t).map_err(|e| format!("{name} t={t}: {e}"))?;
            ensure(r.inequality_9 && r.edge_bound, || format!("{name} t={t}: {r:?}"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} (instance, t) runs, {iterations} cover iterations"))
}

fn hypergraph_suite() -> Outcome {
    let mut sizes = Vec::new();
    let mut instances: Vec<(String, Graph, Vec<u64>)> =
        cover_instances().into_iter().map(|(s, g)| { let t = thresholds(g.n()); (s, g, t) }).collect();
    // an instance with nonempty 𝒫_t: t in (2c + 3, 3c + 4] on layered(3,1,1,c)
    instances.push(("layered(3,1,1,10)".into(), constructions::build_layered_dk(3, 1, 1, 10).unwrap(), vec![24, 34]));
    for (name, g, ts) in instances {
        let ctx = CoverContext::new(&g).map_err(|e| format!("{name}: {e}"))?;
        for t in ts {
            let p_t = cover::extract_p_t(&ctx, t).map_err(|e| e.to_string())?;
            let c = cover::hypergraph_chain(g.n(), &p_t, t, HYPER_SEED).map_err(|e| format!("{name} t={t}: {e}"))?;
            let r = &c.report;
            ensure(c.h2.is_linear() && 2 * t as usize * r.h2 >= r.h1, || format!("{name} t={t}: H2"))?;
            ensure(c.h3.is_three_partite() && c.h3.is_linear() && 9 * r.h3 >= 2 * r.h2, || {
                format!("{name} t={t}: H3")
            })?;
            ensure(c.h4.is_linear() && c.h4.find_triangle().is_none() && 6 * r.h4 >= r.h3, || {
                format!("{name} t={t}: H4")
            })?;
            if r.h1 > 0 {
                sizes.push(format!("{name} t={t}: {}/{}/{}/{}", r.h1, r.h2, r.h3, r.h4));
            }
        }
    }
    Ok(format!("all chains valid; nonempty: {}", sizes.join(", ")))
}

fn enumeration() -> Outcome {
    let mut counts = Vec::new();
    for n in 3..=7usize {
        let r = enumerate_critical(n, 2).map_err(|e| e.to_string())?;
        ensure(r.best_m == Some(n * n / 4), || format!("n = {n}: max m {:?}", r.best_m))?;
        let kb = canonical_graph6(&Graph::complete_bipartite(n / 2, n - n / 2)).unwrap();
        ensure(r.max_edge_witnesses.iter().any(|w| w.graph6 == kb), || format!("n = {n}: balanced K missing"))?;
        counts.push(r.count.unwrap());
    }
    ensure(counts == D2_COUNTS, || format!("counts {counts:?}"))?;
    Ok(format!("max m = floor(n²/4) for n = 3..7; counts {counts:?}"))
}

fn kernel() -> Outcome {
    let g = constructions::build_layered_dk(3, 1, 17, 565).unwrap();
    ensure((g.n(), g.m()) == (600, 9639), || format!("instance is {} / {}", g.n(), g.m()))?;
    let start = Instant::now();
    let v = is_diameter_k_critical(&g, 3);
    let took = start.elapsed();
    ensure(v.is_critical(), || format!("{v:?}"))?;
    ensure(took < KERNEL_LIMIT, || format!("took {took:?}"))?;
    Ok(format!("n = 600, m = 9639 verified in {:.3} s", took.as_secs_f64()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("identity suite", identities),
        ("construction criticality", construction_criticality),
        ("edge-degree upper bound", degree_upper_bound),
        ("edge-degree tightness", degree_tightness),
        ("counterexample ratio", counterexample),
        ("matched-pair counting", matched_counting),
        ("covering algorithm", cover_suite),
        ("hypergraph chain", hypergraph_suite),
        ("extremal enumeration", enumeration),
        ("kernel performance", kernel),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS {name} ({secs:.1} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL {name} ({secs:.1} s): {detail}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
