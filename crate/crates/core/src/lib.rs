//! Random ±1-polytopes: edge oracles, long-edge probabilities, chamber counts
//! of central arrangements, and edge-probability estimators.

pub mod arrangements;
pub mod combinatorics;
pub mod cube;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod lp;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
