//! Exact and Monte Carlo estimators for edge probabilities of random
//! ±1-polytopes.

mod pi;
mod sweep;
mod tau;

pub use pi::*;
pub use sweep::*;
pub use tau::*;
