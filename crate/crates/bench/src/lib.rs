//! Shared fixtures for the benchmarks.

use zenoclone_core::linalg::CMatrix;
use zenoclone_core::model::{build_collapse_ops, build_h_total, initial_state, CollapseOp};
use zenoclone_core::zeno::protocol_schedule;
use zenoclone_core::{DensityMatrix, InitialKind, StateVector, SystemParams};

pub struct Fixture {
    pub params: SystemParams,
    pub h: CMatrix,
    pub ops: Vec<CollapseOp>,
    pub psi0: StateVector,
    pub rho0: DensityMatrix,
    pub t0: f64,
}

/// Fig. 2(b)-like open system with `n` nodes.
pub fn open_fixture(n: usize) -> Fixture {
    let params = SystemParams::dimensionless(n, 100).with_rates(0.005, 0.005, 0.005);
    let h = build_h_total(&params).unwrap();
    let ops = build_collapse_ops(&params).unwrap();
    let psi0 = initial_state(&params, InitialKind::WSeed).unwrap();
    let rho0 = psi0.to_density();
    let t0 = protocol_schedule(&params, 0).unwrap().t_n;
    Fixture {
        params,
        h,
        ops,
        psi0,
        rho0,
        t0,
    }
}
