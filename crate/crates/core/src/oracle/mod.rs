//! Independent reference simulators used to check the graphical rules.
//!
//! [`statevector`] is exact and dense; [`tableau`] is a stabilizer simulator
//! that scales to full lattices.

pub mod statevector;
pub mod tableau;

pub use statevector::{
    clifford_matrix, equal_up_to_global_phase, project_measure, simulate_measurements, PhysicalMeasurement,
    StateVector, DEFAULT_CAP,
};
pub use tableau::{stabilizes_framed_graph, Tableau};
