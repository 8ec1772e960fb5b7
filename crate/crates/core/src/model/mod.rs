//! System parameters, the single-excitation basis, and the full Hamiltonian.
//!
//! Everything lives in the symmetric single-excitation sector: each ensemble of
//! `M` atoms contributes its collective Dicke states, so the coupling of a
//! collective e-excitation to its cavity is enhanced to `√M·g` and no `M`-sized
//! tensor product is ever formed.

mod basis;
mod collapse;
mod geometry;
mod hamiltonian;
mod params;
mod state;

pub use basis::{enumerate_basis, BasisLabel, SubspaceBasis};
pub use collapse::{build_collapse_ops, CollapseOp};
pub use geometry::{ensemble_geometry_check, GeometryCheck};
pub use hamiltonian::{build_h_i, build_h_laser, build_h_total};
pub use params::{mhz_to_angular, NodeField, NodeOverrides, SystemParams, UnitMode};
pub use state::{initial_state, DensityMatrix, InitialKind, StateVector};
