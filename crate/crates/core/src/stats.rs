//! Exact counting statistics. Everything is integer arithmetic; ratios are
//! exact fractions with a decimal rendering for display only.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::criticality::{self, EdgeMultiplicity, TwoCriticalRecord};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Numbers of vertex triples inducing 0, 1, 2 and 3 edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleCounts {
    pub t0: u64,
    pub t1: u64,
    pub t2: u64,
    pub t3: u64,
}

/// Left minus right side of each identity; all zero on a correct count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// `m(n−2) − (3t₃ + 2t₂ + t₁)`
    pub pairs: i128,
    /// `ΣC(d,2) − (3t₃ + t₂)`
    pub cherries: i128,
    /// `(Σd² − mn) − (3t₃ − t₁)`
    pub degree_squares: i128,
}

impl IdentityResiduals {
    pub fn all_zero(&self) -> bool {
        self.pairs == 0 && self.cherries == 0 && self.degree_squares == 0
    }
}

fn choose2(x: u64) -> u128 {
    x as u128 * x.saturating_sub(1) as u128 / 2
}

fn choose3(x: u64) -> u128 {
    if x < 3 {
        0
    } else {
        x as u128 * (x - 1) as u128 * (x - 2) as u128 / 6
    }
}

impl TripleCounts {
    pub fn total(&self) -> u64 {
        self.t0 + self.t1 + self.t2 + self.t3
    }

    pub fn residuals(&self, g: &Graph) -> IdentityResiduals {
        let n = g.n() as i128;
        let m = g.m() as i128;
        let (t1, t2, t3) = (self.t1 as i128, self.t2 as i128, self.t3 as i128);
        let cherries: i128 = g.degrees().iter().map(|&d| choose2(d as u64) as i128).sum();
        let sq = g.degree_square_sum() as i128;
        IdentityResiduals {
            pairs: m * (n - 2) - (3 * t3 + 2 * t2 + t1),
            cherries: cherries - (3 * t3 + t2),
            degree_squares: (sq - m * n) - (3 * t3 - t1),
        }
    }
}

/// Triple counts from three independent sums: triangles from common
/// neighbors of edges, `t₂` from common neighbors of non-edges, `t₁` from
/// common non-neighbors of edges; `t₀` is the remainder. The three counting
/// identities are then checked exactly, and a failure is a bug signal.
pub fn triple_counts(g: &Graph) -> Result<TripleCounts> {
    let n = g.n();
    let full = bits::full(n);
    let (t3x3, t2, t1) = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut acc = (0u64, 0u64, 0u64);
            let ru = g.row(u);
            for v in u + 1..n {
                let rv = g.row(v);
                if g.has_edge(u, v) {
                    acc.0 += bits::intersection_count(ru, rv) as u64;
                    let union: usize = ru
                        .iter()
                        .zip(rv)
                        .zip(&full)
                        .map(|((a, b), f)| ((a | b) & f).count_ones() as usize)
                        .sum();
                    acc.2 += (n - union) as u64;
                } else {
                    acc.1 += bits::intersection_count(ru, rv) as u64;
                }
            }
            acc
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    if t3x3 % 3 != 0 {
        return Err(Error::CountingViolation(format!("edge-triangle incidences {t3x3} not divisible by 3")));
    }
    let t3 = t3x3 / 3;
    let total = choose3(n as u64);
    let rest = t1 as u128 + t2 as u128 + t3 as u128;
    if rest > total {
        return Err(Error::CountingViolation(format!("{rest} triples exceed C(n,3) = {total}")));
    }
    let tc = TripleCounts {
        t0: (total - rest) as u64,
        t1,
        t2,
        t3,
    };
    let res = tc.residuals(g);
    if !res.all_zero() {
        return Err(Error::CountingViolation(format!("identity residuals {res:?}")));
    }
    Ok(tc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDegreeVerdict {
    pub degree_square_sum: u128,
    pub nm: u128,
    /// `Σd² ≤ nm`.
    pub at_most_nm: bool,
    /// `Σd² ≤ (6/5)·nm`.
    pub at_most_six_fifths_nm: bool,
    pub ratio: Ratio<u128>,
}

/// Compares `Σd²` with `nm` and `(6/5)nm`. For `k ≥ 3` (with `g` asserted
/// diameter-`k`-critical by the caller) `Σd² > nm` is a bug signal.
pub fn check_edge_degree_bounds(g: &Graph, k: u32) -> Result<EdgeDegreeVerdict> {
    let sq = g.degree_square_sum();
    let nm = g.n() as u128 * g.m() as u128;
    let v = EdgeDegreeVerdict {
        degree_square_sum: sq,
        nm,
        at_most_nm: sq <= nm,
        at_most_six_fifths_nm: 5 * sq <= 6 * nm,
        ratio: if nm == 0 { Ratio::from_integer(0) } else { Ratio::new(sq, nm) },
    };
    if k >= 3 && !v.at_most_nm {
        return Err(Error::TheoremViolation(format!(
            "sum of squared degrees {sq} exceeds nm = {nm} at diameter {k}"
        )));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCountVerdict {
    pub m: u64,
    /// `m ≤ 3n²/k`.
    pub at_most_three_n2_over_k: bool,
    /// `m ≤ n²/4`.
    pub at_most_quarter_n2: bool,
    /// `m ≤ n²/6`, reported for `k = 3` only; the bound is asymptotic.
    pub at_most_sixth_n2: Option<bool>,
}

pub fn check_edge_count_bounds(g: &Graph, k: u32) -> EdgeCountVerdict {
    let n2 = (g.n() as u128).pow(2);
    let m = g.m() as u128;
    EdgeCountVerdict {
        m: g.m() as u64,
        at_most_three_n2_over_k: k as u128 * m <= 3 * n2,
        at_most_quarter_n2: 4 * m <= n2,
        at_most_sixth_n2: (k == 3).then_some(6 * m <= n2),
    }
}

/// Pairs `{u, v}` with `N(u) ∩ N(v) = ∅`, and their number. Checks
/// `e(g) + di(g) ≤ n²/2`, which holds for every graph.
pub fn disjoint_neighborhood_pairs(g: &Graph) -> Result<(Vec<(usize, usize)>, u64)> {
    let n = g.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            (u + 1..n)
                .filter(move |&v| !bits::intersects(g.row(u), g.row(v)))
                .map(move |v| (u, v))
        })
        .collect();
    let di = pairs.len() as u64;
    if 2 * (g.m() as u128 + di as u128) > (n as u128).pow(2) {
        return Err(Error::LemmaViolation(format!(
            "e + di = {} + {di} exceeds n^2/2 for n = {n}",
            g.m()
        )));
    }
    Ok((pairs, di))
}

/// Length-2 two-critical paths whose edges both have multiplicity below `t`
/// (`None` means no threshold).
pub fn t_light_paths<'a>(
    g: &Graph,
    mult: &[EdgeMultiplicity],
    two: &'a [TwoCriticalRecord],
    t: Option<u64>,
) -> Vec<&'a TwoCriticalRecord> {
    two.iter()
        .filter(|r| r.len() == 2)
        .filter(|r| {
            criticality::path_edge_ids(g, &r.path)
                .iter()
                .all(|e| t.is_none_or(|t| (mult[e.0].total() as u64) < t))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatsReport {
    pub n: u64,
    pub m: u64,
    pub k: u32,
    pub degree_square_sum: u128,
    /// `Σd² / m`.
    pub avg_edge_degree: Ratio<u128>,
    pub ratio: Ratio<u128>,
    pub ratio_decimal: f64,
    pub triples: TripleCounts,
    pub residuals: IdentityResiduals,
    pub di: u64,
    /// Triangles with at least three feet; present for diameter-2-critical inputs.
    pub t3_star: Option<u64>,
    pub edge_degree: EdgeDegreeVerdict,
    pub edge_count: EdgeCountVerdict,
}

/// Everything above in one report. `k` selects which bounds are asserted.
pub fn stats_report(g: &Graph, k: u32) -> Result<StatsReport> {
    let triples = triple_counts(g)?;
    let (_, di) = disjoint_neighborhood_pairs(g)?;
    let edge_degree = check_edge_degree_bounds(g, k)?;
    let sq = g.degree_square_sum();
    let m = g.m() as u128;
    let t3_star = if k == 2 {
        match criticality::feet_census(g) {
            Ok(c) => Some(c.t3_star),
            Err(e) if e.is_bug_signal() => return Err(e),
            Err(_) => None,
        }
    } else {
        None
    };
    Ok(StatsReport {
        n: g.n() as u64,
        m: g.m() as u64,
        k,
        degree_square_sum: sq,
        avg_edge_degree: if m == 0 { Ratio::from_integer(0) } else { Ratio::new(sq, m) },
        ratio: edge_degree.ratio,
        ratio_decimal: *edge_degree.ratio.numer() as f64 / *edge_degree.ratio.denom() as f64,
        residuals: triples.residuals(g),
        triples,
        di,
        t3_star,
        edge_degree,
        edge_count: check_edge_count_bounds(g, k),
    })
}
