//! Experiment harness for the graph super-resolution library: configuration,
//! training loop, cross-validation, the experiment families, and result
//! emission.

pub mod checkpoint;
pub mod config;
pub mod experiments;
pub mod report;
pub mod timing;
pub mod train;
