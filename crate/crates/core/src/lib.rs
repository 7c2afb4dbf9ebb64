//! Percolation of entanglement on complex networks.
//!
//! Graphs, degree models and generators; q-swap preprocessing; analytic
//! giant-component, threshold and limited-path results from generating
//! functions; and a seeded Monte Carlo engine to check them against.

pub mod analytic;
pub mod degree;
pub mod error;
pub mod generators;
pub mod graph;
pub mod links;
pub mod qswap;
pub mod rng;
pub mod series;
pub mod sim;
pub mod union_find;

pub use degree::{DegreeKind, DegreeModel};
pub use error::{Error, Result};
pub use generators::{EdgeListOptions, GeneratorKind, GeneratorSpec};
pub use graph::{ComponentStats, Edge, EdgeClass, Graph, PathLengthHistogram};
pub use links::{PathBudget, PureLink, WernerLink};
pub use qswap::{SwapReport, SwapStrategy};
pub use sim::{Estimate, ScanPoint, SweepConfig, SweepResult};
