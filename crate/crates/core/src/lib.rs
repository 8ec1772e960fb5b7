//! Simulation of W-state generation and 1→N phase-covariant cloning between
//! atomic ensembles in cavities joined by a star fiber coupler, in the
//! strong-coupling (Zeno) regime and under the full closed and open dynamics.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod zeno;

pub use error::{Error, Result};
pub use model::{BasisLabel, DensityMatrix, InitialKind, StateVector, SystemParams, UnitMode};
