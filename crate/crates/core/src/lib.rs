//! Enumerates diverse, non-dominated microgrid designs that meet a load
//! profile.
//!
//! Sizing runs in three stages over a pluggable [`simulator::Simulator`]:
//! a coarse exhaustive search with dominance pruning, a halving search on a
//! finer capacity grid seeded from it, and a one-level local descent from
//! the non-dominated results.

pub mod dominance;
pub mod error;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod model;
pub mod search;
pub mod simulator;

pub use dominance::{dominates, non_dominated};
pub use error::{Error, Result};
pub use grid::{snap_to_grid, CapacityGrid, DesignGrids};
pub use metrics::{deficit_ratio, unused_ratio};
pub use model::{
    DerKind, DerSpec, DesignSpace, EvaluatedDesign, LoadProfile, MicrogridDesign, SimulationOutcome,
};
pub use search::{run_pipeline, SearchConfig, SearchReport};
pub use simulator::{DispatchConfig, ReferenceSimulator, Simulator};
