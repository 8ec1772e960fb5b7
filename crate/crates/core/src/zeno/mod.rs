//! The strong-coupling (Zeno) limit of the star network.
//!
//! `H_I` splits the subspace into invariant sectors; the drive only acts through
//! its projections onto them. From `|f₁⟩` the dynamics never leaves the zero
//! sector `span{G, f_1..f_N, d}`, where `d` is the dark state of `H_I`.

mod analytic;
mod dark;
mod fidelity;
mod projection;

pub use analytic::{
    amplitudes_abcd, analytic_state, effective_couplings, effective_hamiltonian, protocol_schedule,
    rabi_mu, w_state, ProtocolSchedule, ZenoAmplitudes,
};
pub use dark::{dark_state, DarkState};
pub use fidelity::{clone_fidelity_formula, fidelity_qubit1_eff, fidelity_qubit2_eff};
pub use projection::{zeno_projected_hamiltonian, ZenoProjection, ZenoSector};
