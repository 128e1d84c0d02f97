//! Greedy large-neighbourhood local search for lattice Ising ground states.
//!
//! The crate covers periodic cubic and toric-Pegasus lattices, instance
//! generators (±J glasses, ferromagnets, tile-planted problems), classical
//! samplers, a model of minor embedding on Pegasus hardware, the LNLS driver
//! with a simulated access-time clock, and benchmarking utilities.

pub mod bench;
pub mod embedding;
pub mod error;
pub mod generators;
pub mod graph;
pub mod ising;
pub mod lattice;
pub mod lnls;
pub mod rng;
pub mod samplers;

pub use error::{Error, Result};
