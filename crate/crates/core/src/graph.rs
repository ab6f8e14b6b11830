//! Simple undirected graphs with bit-row adjacency and a sorted edge list.
//!
//! Vertices are the dense integers `0..n`. Adjacency is stored as one bit row
//! per vertex (`n * ceil(n/64)` words, so memory is O(n²/64) words), and the
//! edge list is kept sorted so that an [`EdgeId`] is a stable index within a
//! single `Graph` value.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};

/// Index of an edge in a graph's sorted edge list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edges: Vec<(u32, u32)>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("m", &self.m())
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from an arbitrary list of pairs; duplicates (in either
    /// orientation) are dropped and the edge list is sorted.
    pub fn build<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::TooLarge { n, max: u32::MAX as usize });
        }
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::OutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            list.push((a as u32, b as u32));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted(n, list))
    }

    /// `edges` must be sorted, deduplicated, with `u < v < n` in every pair.
    pub(crate) fn from_sorted(n: usize, edges: Vec<(u32, u32)>) -> Graph {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let words = bits::words_for(n);
        let mut rows = vec![0u64; n * words];
        for &(u, v) in &edges {
            let (u, v) = (u as usize, v as usize);
            debug_assert!(u < v && v < n);
            bits::set(&mut rows[u * words..(u + 1) * words], v);
            bits::set(&mut rows[v * words..(v + 1) * words], u);
        }
        Graph { n, words, rows, edges }
    }

    pub fn empty(n: usize) -> Graph {
        Self::from_sorted(n, Vec::new())
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        Self::from_sorted(n, edges)
    }

    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::BadParams(format!("cycle needs n >= 3, got {n}")));
        }
        Self::build(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Graph {
        Self::build(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    /// `K_{a,b}` with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let edges = (0..a as u32)
            .flat_map(|u| (a as u32..(a + b) as u32).map(move |v| (u, v)))
            .collect();
        Self::from_sorted(a + b, edges)
    }

    /// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i -- i+5`.
    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, i + 5));
        }
        Self::build(10, edges).expect("petersen edges are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Number of `u64` words per adjacency row.
    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bits::test(self.row(u), v)
    }

    pub fn neighbors(&self, v: usize) -> bits::Ones<'_> {
        bits::ones(self.row(v))
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        bits::count(self.row(v))
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Σ d_v², exact.
    pub fn degree_square_sum(&self) -> u128 {
        (0..self.n).map(|v| (self.degree(v) as u128).pow(2)).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn common_neighbor_count(&self, u: usize, v: usize) -> usize {
        bits::intersection_count(self.row(u), self.row(v))
    }

    /// Edge endpoints `(u, v)` with `u < v`, in edge-id order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    pub fn edge_ids(&self) -> impl ExactSizeIterator<Item = EdgeId> {
        (0..self.m()).map(EdgeId)
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (usize, usize) {
        let (u, v) = self.edges[e.0];
        (u as usize, v as usize)
    }

    /// Looks up the id of edge `{u, v}` (either orientation).
    pub fn edge_id(&self, u: usize, v: usize) -> Option<EdgeId> {
        let key = if u < v { (u as u32, v as u32) } else { (v as u32, u as u32) };
        self.edges.binary_search(&key).ok().map(EdgeId)
    }

    pub fn complement(&self) -> Graph {
        let mut edges = Vec::with_capacity((self.n * self.n.saturating_sub(1) / 2).saturating_sub(self.m()));
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    edges.push((u as u32, v as u32));
                }
            }
        }
        Self::from_sorted(self.n, edges)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::BadParams(format!(
                "permutation has length {} but n = {}",
                perm.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::BadParams("not a permutation".into()));
            }
        }
        Self::build(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    /// A new graph with edge `{u, v}` added (no-op if present).
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        Self::build(self.n, self.edges().chain(std::iter::once((u, v))))
    }

    /// A new graph with the given edge removed.
    pub fn without_edge(&self, e: EdgeId) -> Graph {
        let mut edges = self.edges.clone();
        edges.remove(e.0);
        Self::from_sorted(self.n, edges)
    }

    /// Checks symmetry, loop-freedom, and agreement between rows and the
    /// edge list.
    pub fn check_invariants(&self) -> bool {
        let mut above = 0usize;
        let mut degree_sum = 0usize;
        for u in 0..self.n {
            if self.has_edge(u, u) {
                return false;
            }
            for v in self.neighbors(u) {
                if v >= self.n || !self.has_edge(v, u) {
                    return false;
                }
                if v > u {
                    above += 1;
                }
                degree_sum += 1;
            }
        }
        above == self.m()
            && degree_sum == 2 * self.m()
            && self.edges.windows(2).all(|w| w[0] < w[1])
            && self.edges().all(|(u, v)| u < v && self.has_edge(u, v))
    }

    pub fn to_graph6(&self) -> String {
        let mut out = Vec::new();
        let n = self.n as u64;
        if n <= 62 {
            out.push(n as u8 + 63);
        } else if n <= 258_047 {
            out.push(126);
            for shift in [12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        } else {
            out.push(126);
            out.push(126);
            for shift in [30, 24, 18, 12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        }
        let mut acc = 0u8;
        let mut filled = 0;
        for j in 1..self.n {
            for i in 0..j {
                acc = (acc << 1) | self.has_edge(i, j) as u8;
                filled += 1;
                if filled == 6 {
                    out.push(acc + 63);
                    acc = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            out.push((acc << (6 - filled)) + 63);
        }
        String::from_utf8(out).expect("graph6 bytes are printable ASCII")
    }

    /// Parses one graph6 record. An optional `>>graph6<<` header and trailing
    /// line terminators are accepted; anything else must be exact.
    pub fn from_graph6(input: &[u8]) -> Result<Graph> {
        let header = b">>graph6<<";
        let mut start = 0;
        if input.starts_with(header) {
            start = header.len();
        }
        let mut end = input.len();
        while end > start && matches!(input[end - 1], b'\n' | b'\r') {
            end -= 1;
        }
        let data = &input[start..end];
        let err = |i: usize, reason: &str| Error::Parse {
            offset: start + i,
            reason: reason.to_string(),
        };
        for (i, &b) in data.iter().enumerate() {
            if !(63..=126).contains(&b) {
                return Err(err(i, &format!("byte 0x{b:02x} outside the graph6 range 63..=126")));
            }
        }
        let (n, mut pos) = match data {
            [] => return Err(err(0, "empty input")),
            [126, 126, rest @ ..] => {
                if rest.len() < 6 {
                    return Err(err(data.len(), "truncated 8-byte vertex count"));
                }
                let n = rest[..6].iter().fold(0u64, |acc, &b| (acc << 6) | (b - 63) as u64);
                (n, 8)
            }
            [126, rest @ ..] => {
                if rest.len() < 3 {
                    return Err(err(data.len(), "truncated 4-byte vertex count"));
                }
                let n = rest[..3].iter().fold(0u64, |acc, &b| (acc << 6) | (b - 63) as u64);
                (n, 4)
            }
            [b, ..] => ((b - 63) as u64, 1),
        };
        if n > u32::MAX as u64 {
            return Err(err(0, "vertex count too large"));
        }
        let n = n as usize;
        let total_bits = n * n.saturating_sub(1) / 2;
        let expected = total_bits.div_ceil(6);
        if data.len() - pos != expected {
            return Err(err(
                data.len().min(pos + expected),
                &format!("expected {expected} adjacency bytes, found {}", data.len() - pos),
            ));
        }
        let mut edges = Vec::new();
        let mut k = 0usize;
        'outer: for j in 1..n {
            for i in 0..j {
                let byte = data[pos + k / 6] - 63;
                if byte >> (5 - k % 6) & 1 == 1 {
                    edges.push((i as u32, j as u32));
                }
                k += 1;
                if k == total_bits {
                    break 'outer;
                }
            }
        }
        if total_bits % 6 != 0 {
            let last = data[data.len() - 1] - 63;
            let pad = 6 - total_bits % 6;
            if last & ((1 << pad) - 1) != 0 {
                return Err(err(data.len() - 1, "nonzero padding bits"));
            }
        }
        pos += expected;
        debug_assert_eq!(pos, data.len());
        edges.sort_unstable();
        Ok(Self::from_sorted(n, edges))
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Graph> {
        Self::build(json.n, json.edges.iter().map(|&[u, v]| (u, v)))
    }

    pub fn from_json_str(s: &str) -> Result<Graph> {
        let json: GraphJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
        Self::from_json(&json)
    }
}

/// `{"n": int, "edges": [[u, v], ...]}` with `u < v` and edges sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}
