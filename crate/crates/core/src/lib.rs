//! Semantic move recommendation for parity games built from LTL specifications.

pub mod eval;
pub mod features;
pub mod game;
pub mod ltl;
pub mod ranker;
pub mod rng;
pub mod translate;
pub mod truth;
