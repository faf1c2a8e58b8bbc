//! Passenger assignment on scheduled transit by column generation over a
//! partially time-expanded graph.

pub mod fixtures;
pub mod graph;
pub mod master;
pub mod model;
pub mod oracle;
pub mod pricing;
pub mod simplex;
pub mod solver;
pub mod synthetic;
