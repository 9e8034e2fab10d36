//! Planning and verification of graph-state extraction from 2D cluster
//! states using single-qubit Pauli measurements.
//!
//! Layers, bottom up: [`graph`] holds graph states and the measurement
//! rewrite rules, [`oracle`] holds exact simulators that check them,
//! [`lattice`] models the grid, [`primitives`] builds measurement gadgets
//! on it and [`planners`] combines gadgets into full extraction plans.

pub mod error;
pub mod graph;
pub mod lattice;
pub mod oracle;
pub mod planners;
pub mod primitives;
pub mod render;

pub use error::{Error, Result};
