//! Graph super-resolution library.
//!
//! Infers high-resolution weighted graphs from low-resolution counterparts.
//! Node super-resolution runs over a fully connected bipartite graph between
//! LR and HR nodes; edge inference can either take dot products of HR node
//! features or learn edge representations on the dual (line) graph of the
//! complete HR graph. Everything trains on a small reverse-mode autodiff
//! engine, and a metric suite of weighted-graph topology measures supports
//! both TopK pooling and evaluation.

pub mod data;
pub mod diff;
pub mod dual;
pub mod error;
pub mod gnn;
pub mod graph;
pub mod metrics;
pub mod models;
pub mod params;

pub use error::{Error, Result};
