//! Sparse complex-valued lattices on the 3-D integer grid, a table-driven
//! coupling engine that iterates them, and the discretized vacuum Maxwell
//! system expressed as one such table.
//!
//! The engine is generic: a [`CouplingTable`] lists shifted, scaled
//! additions from one lattice into another, and one iteration applies every
//! entry to frames that all read the previous iteration. The Maxwell model
//! in [`maxwell`] is a 30-entry table over six lattices (three electric and
//! three rescaled magnetic components) plus a fused stencil that produces the
//! same bits faster.
//!
//! Data-parallel kernels use rayon when the `parallel` feature is enabled
//! (the default) and fall back to plain iterators otherwise. Results are
//! bit-identical in both modes.

pub mod analysis;
pub mod engine;
pub mod io;
pub mod lattice;
pub mod maxwell;
mod par;

pub use analysis::{GrowthEstimate, MaximaReport, Series, StatisticKind, SubspaceSpec};
pub use engine::{
    CouplingEntry, CouplingTable, EngineError, EngineState, Probe, PrunePolicy, RunRecord,
    Violation,
};
pub use lattice::{Bounds, Lattice, LatticeError, PruneReport, Quantity, Site};
pub use maxwell::{CouplingFactor, Field, FieldState, PhysicalScale};

