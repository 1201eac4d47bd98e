//! Transaction-graph reconstruction and small-world analysis for
//! distributed ledgers.
//!
//! The pipeline has four on-disk stages: fetched transactions are written as
//! newline-delimited JSON records ([`ingest`]), built into a [`DirectedGraph`]
//! stored in Pajek format ([`pajek`]), analyzed ([`metrics`]), and compared
//! against a size-matched Erdős–Rényi graph ([`nullmodel`]).

pub mod cli;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod nullmodel;
pub mod pajek;

pub use graph::{ArcInsert, Component, ComponentKind, DirectedGraph, GraphError, NodeId};
