//! Quenched ferromagnets on Poisson–Gilbert random graphs.
//!
//! The crate samples homogeneous Poisson configurations, joins them into
//! fixed-radius graphs, studies their percolation, and runs finite-volume
//! Gibbs samplers for Ising and continuous spins on the resulting random
//! lattice, with exact enumeration and quadrature oracles for small systems.

pub mod error;
pub mod geomgraph;
pub mod harness;
pub mod percolation;
pub mod pointprocess;
pub mod quadrature;
pub mod rng;
pub mod spinsystem;
pub mod stats;
pub mod wells;

pub use error::{Error, Result};
