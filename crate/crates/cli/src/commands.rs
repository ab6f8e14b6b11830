use std::collections::BTreeMap;
use std::path::Path;

use diamcrit::constructions::{self, CounterexampleOptions};
use diamcrit::cover::{self, CoverContext};
use diamcrit::criticality::{self, is_diameter_k_critical, CriticalityVerdict};
use diamcrit::search::{self, Objective};
use diamcrit::{stats, Graph};
use num_rational::Ratio;
use serde_json::{json, Value};

use crate::io;
use crate::{Command, Failure, Family, SearchMode, SearchObjective};

type Outcome = Result<Value, Failure>;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: Family) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::usage(format!("--{flag} is required for {family:?}")))
}

fn summary(g: &Graph) -> Value {
    let nm = g.n() as u128 * g.m() as u128;
    json!({
        "n": g.n(),
        "m": g.m(),
        "degree_square_sum": g.degree_square_sum(),
        "nm": nm,
    })
}

fn verdict_value(v: &CriticalityVerdict, k: u32) -> Value {
    let mut out = to_value(v);
    out["k"] = json!(k);
    out
}

/// Fails with exit code 2 unless `g` is diameter-`k`-critical.
fn require_critical(g: &Graph, k: u32) -> Result<(), Failure> {
    let v = is_diameter_k_critical(g, k);
    if v.is_critical() {
        Ok(())
    } else {
        Err(Failure::verdict(
            format!("not diameter-{k}-critical"),
            json!({ "graph": summary(g), "criticality": verdict_value(&v, k) }),
        ))
    }
}

fn default_t(n: usize) -> u64 {
    ((n as f64).powf(2.0 / 3.0).ceil() as u64).max(1)
}

pub fn dispatch(cmd: &Command, json_out: bool) -> Outcome {
    match cmd {
        Command::Construct {
            family,
            gen,
            r,
            k,
            a,
            b,
            c,
            n,
            p,
            x,
            seed,
            out,
            format,
            no_verify,
        } => {
            let family = *family;
            let generator = || -> Result<Graph, Failure> {
                match gen {
                    Some(path) => io::read_graph(path),
                    None => Ok(Graph::cycle(5)?),
                }
            };
            let mut extra = Value::Null;
            let (graph, claimed) = match family {
                Family::D2Bip => (Some(constructions::build_d2_bip(&generator()?)?), Some(2)),
                Family::D2Trip => (
                    Some(constructions::build_d2_trip(&generator()?, need(*r, "r", family)?)?),
                    Some(2),
                ),
                Family::Dk => {
                    let k = need(*k, "k", family)?;
                    let g = constructions::build_layered_dk(k, need(*a, "a", family)?, need(*b, "b", family)?, need(*c, "c", family)?)?;
                    (Some(g), Some(k as u32))
                }
                Family::CliqueMatching => (Some(constructions::build_clique_matching(need(*n, "n", family)?)?), Some(3)),
                Family::Gnp => (
                    Some(constructions::sample_gnp(need(*n, "n", family)?, need(*p, "p", family)?, *seed)?),
                    None,
                ),
                Family::Counterexample => {
                    let x: Ratio<u64> = x.parse().map_err(|_| Failure::usage(format!("bad --x {x}")))?;
                    let ce = constructions::build_counterexample(
                        need(*n, "n", family)?,
                        x,
                        *seed,
                        &CounterexampleOptions::default(),
                    )?;
                    extra = to_value(&ce.report);
                    (ce.graph, Some(2))
                }
            };
            let mut result = json!({ "family": family, "claimed_k": claimed, "counterexample": extra });
            let Some(g) = graph else {
                return Ok(result);
            };
            result["graph"] = summary(&g);
            if let (Some(k), false) = (claimed, *no_verify) {
                let v = is_diameter_k_critical(&g, k);
                result["criticality"] = verdict_value(&v, k);
                if !v.is_critical() {
                    return Err(Failure {
                        code: 3,
                        message: format!("construction is not diameter-{k}-critical"),
                        result: Some(result),
                    });
                }
            }
            match out {
                Some(path) => io::write_text(path, &io::render_graph(&g, *format))?,
                None if json_out => result["encoded"] = json!(io::render_graph(&g, *format).trim_end()),
                None => {
                    print!("{}", io::render_graph(&g, *format));
                    return Ok(Value::Null);
                }
            }
            Ok(result)
        }

        Command::Verify { input, k } => {
            let g = io::read_graph(input)?;
            let v = is_diameter_k_critical(&g, *k);
            let result = json!({ "graph": summary(&g), "criticality": verdict_value(&v, *k) });
            if v.is_critical() {
                Ok(result)
            } else {
                Err(Failure::verdict(format!("not diameter-{k}-critical"), result))
            }
        }

        Command::Stats { input, k } => {
            let g = io::read_graph(input)?;
            require_critical(&g, *k)?;
            Ok(to_value(&stats::stats_report(&g, *k)?))
        }

        Command::Cover { input, t, seed, trace } => {
            let g = io::read_graph(input)?;
            let ctx = CoverContext::new(&g)?;
            let t = t.unwrap_or_else(|| default_t(g.n()));
            let tr = cover::run_cover_with(&ctx)?;
            let g0 = cover::build_g0(&ctx, t)?;
            let p_t = cover::extract_p_t(&ctx, t)?;
            let bound = cover::verify_s_bound(&tr, &g0, &p_t)?;
            if let Some(path) = trace {
                let text = serde_json::to_string_pretty(&tr).expect("serializable") + "\n";
                io::write_text(path, &text)?;
            }
            let hist: BTreeMap<&str, usize> = tr.histogram();
            Ok(json!({
                "graph": summary(&g),
                "diameter": ctx.diameter,
                "t": t,
                "seed": seed,
                "iterations": tr.s(),
                "cases": hist,
                "g0": {
                    "edges": g0.graph.m(),
                    "heavy_deleted": g0.heavy.len(),
                    "light_deleted": g0.light.len(),
                    "light_paths": g0.light_paths.len(),
                },
                "p_t": p_t.len(),
                "s_bound": bound,
            }))
        }

        Command::Hyper { input, t, seed } => {
            let g = io::read_graph(input)?;
            let ctx = CoverContext::new(&g)?;
            let t = t.unwrap_or_else(|| default_t(g.n()));
            let p_t = cover::extract_p_t(&ctx, t)?;
            let chain = cover::hypergraph_chain(g.n(), &p_t, t, *seed)?;
            let edges = |h: &cover::Hypergraph3| h.edges.iter().map(|e| e.vertices).collect::<Vec<_>>();
            Ok(json!({
                "graph": summary(&g),
                "p_t": p_t.iter().map(|r| r.path.clone()).collect::<Vec<_>>(),
                "report": chain.report,
                "h4_edges": edges(&chain.h4),
            }))
        }

        Command::Search {
            n,
            k,
            mode,
            objective,
            seed,
            budget,
            restarts,
            out,
        } => {
            let objective = match objective {
                SearchObjective::Edges => Objective::Edges,
                SearchObjective::Ratio => Objective::Ratio,
            };
            let res = match mode {
                SearchMode::Exhaustive => search::enumerate_critical(*n, *k)?,
                SearchMode::Local => search::local_search_restarts(*n, *k, objective, *seed, *budget, *restarts)?,
            };
            let value = to_value(&res);
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&value).expect("serializable") + "\n";
                io::write_text(path, &text)?;
            }
            if res.alarms.is_empty() {
                Ok(value)
            } else {
                Err(Failure::verdict("a witness exceeds n^2/4 edges", value))
            }
        }

        Command::Report { input, k } => report(input, *k),
    }
}

fn report(input: &Path, k: u32) -> Outcome {
    let g = io::read_graph(input)?;
    require_critical(&g, k)?;
    let mut out = json!({
        "graph": summary(&g),
        "criticality": verdict_value(&CriticalityVerdict::Critical, k),
        "stats": stats::stats_report(&g, k)?,
    });
    if k == 2 {
        out["feet"] = to_value(&criticality::feet_census(&g)?);
    } else if k >= 3 {
        let mc = criticality::matched_counts(&g, k)?;
        out["matched"] = json!({
            "total": mc.total,
            "pairs_by_count": mc.pairs_by_count,
            "min_edge_count": mc.min_edge_count,
            "required": mc.required,
            "edge_bound_holds": mc.edge_bound_holds(g.n()),
        });
        let ch = criticality::verify_triangle_charging(&g, k)?;
        out["charging"] = json!({
            "triangles": ch.triangles,
            "charged_triples": ch.charged_triples,
            "min_charge": ch.min_charge,
            "t1": ch.t1,
            "certificate": ch.certificate,
            "degree_bound": ch.degree_bound,
        });
        let ctx = CoverContext::new(&g)?;
        let tr = cover::run_cover_with(&ctx)?;
        out["cover"] = json!({ "iterations": tr.s(), "cases": tr.histogram() });
    }
    Ok(out)
}
