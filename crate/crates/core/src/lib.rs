//! Bond percolation on finite windows of `G x Z` with randomly reinforced
//! regions built from boxes stacked or overlapping along the origin axis.
//!
//! Edges inside the reinforced region are open with probability `q`, all
//! others with probability `p`.

pub mod bounds;
pub mod cli;
pub mod engine;
pub mod environment;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod numeric;
pub mod rng;

pub use error::{Error, Result};
