//! Desk-scale tools for counting hypergraphs that avoid a fixed hypertree:
//! delta-system filtering, supersaturation counts, graded copy collections
//! and container trees, each paired with a brute-force oracle.

pub mod balanced;
pub mod bitset;
pub mod combinatorics;
pub mod container;
pub mod delta;
pub mod embed;
mod error;
pub mod harness;
pub mod hypergraph;
pub mod hypertree;
pub mod oracle;
pub mod textio;

pub use error::{Error, Result};
pub use hypergraph::{Hypergraph, Vertex, VertexSet};

/// Snippets from the guide in `book/src`, compiled as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hypergraphs.md")]
    mod hypergraphs {}
    #[doc = include_str!("../../../book/src/hypertrees.md")]
    mod hypertrees {}
    #[doc = include_str!("../../../book/src/delta-systems.md")]
    mod delta_systems {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/balanced.md")]
    mod balanced {}
    #[doc = include_str!("../../../book/src/containers.md")]
    mod containers {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
