//! Exact counting of weighted independent sets.
//!
//! The library computes `nbwis(G, w) = Σ_{S independent in G} Π_{v ∈ S} w(v)`
//! with exact rational arithmetic, via three independent routes:
//!
//! * a peel-and-reweight algorithm for strongly orderable graphs
//!   ([`socount`]), available both as a direct exact computation and as a
//!   compiler emitting a positive arithmetic circuit ([`circuit`]) that can be
//!   evaluated with certified software floating point ([`softfloat`]) and
//!   rounded back to the exact answer;
//! * a label-subset dynamic program over clique-width expressions
//!   ([`cliquewidth`]);
//! * a brute-force enumeration oracle ([`testkit`]) that anchors the test
//!   suite and is exposed for cross-checking.
//!
//! Supporting modules: [`graph`] (graph and weight data model with file I/O),
//! [`ordering`] (strong-ordering verification and search), [`cograph`]
//! (cotree construction and independence-polynomial circuits for cographs).

pub mod circuit;
pub mod cliquewidth;
pub mod cograph;
pub mod graph;
pub mod ordering;
pub mod rat;
pub mod socount;
pub mod softfloat;
pub mod testkit;
pub mod weight;

pub use graph::{Graph, Vertex};
pub use weight::WeightFunction;
