//! Sceptic rumour propagation on `N`, `N^2` and `R_+^d`.
//!
//! A site counts as informed only once `k` distinct sources reach it. The
//! crate samples firework (rightward) and reverse-firework (leftward
//! listening) processes, computes exact under-coverage probabilities with
//! brute-force oracles to check them, and runs the continuum Boolean
//! analogue. The `rumourlab` binary drives all of it as reproducible
//! experiments.

pub mod continuum;
pub mod distribution;
pub mod exact;
pub mod exec;
pub mod experiment;
pub mod lattice;
pub mod stats;

pub use distribution::{DistError, ExtendedReal, TailDistribution, TailFunctionals};
pub use lattice::{Dimension, LatticeConfig, Model, Site};
