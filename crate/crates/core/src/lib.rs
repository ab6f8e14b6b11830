//! Diameter-critical graphs: constructions, exhaustive criticality
//! verification, the counting identities and charging arguments built on
//! "deleting an edge raises a distance", and the greedy critical-path cover
//! used to bound edge counts in diameter 3.
//!
//! Layout:
//! - [`graph`]: the [`Graph`] type, graph6 and JSON formats.
//! - [`metric`]: bit-parallel BFS, diameter, distances in `G − e`.
//! - [`criticality`]: association, critical paths, multiplicities, feet,
//!   arms, matched pairs, and the triangle-charging certificate.
//! - [`constructions`]: the graph families and the seeded random sampler.
//! - [`stats`]: triple counts, edge-degree and edge-count verdicts.
//! - [`cover`]: edge types, the covering algorithm and its trace checks,
//!   the pruned graph `G₀`, and the 3-uniform hypergraph chain.
//! - [`search`]: exhaustive enumeration and local search.

pub mod bits;
pub mod constructions;
pub mod cover;
pub mod criticality;
pub mod error;
pub mod graph;
pub mod metric;
pub mod rng;
pub mod search;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, GraphJson};
pub use metric::ExtDist;
