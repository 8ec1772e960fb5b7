use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, hermiticity_deviation, min_eigenvalue, outer, trace, CMatrix, CVector, C64,
};

use super::{BasisLabel, SystemParams};

/// Complex amplitudes over the canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    pub fn new(amplitudes: CVector) -> Self {
        Self(amplitudes)
    }

    pub fn basis(dim: usize, label: BasisLabel) -> Self {
        let mut v = CVector::zeros(dim);
        v[label.index()] = c(1.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn n_cavities(&self) -> usize {
        (self.dim() - 2) / 3
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn amplitude(&self, label: BasisLabel) -> C64 {
        self.0[label.index()]
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix(outer(&self.0))
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> C64 {
        self.0.dotc(&other.0)
    }
}

/// Dense density matrix over the canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Self {
        Self(matrix)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim) * c(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_cavities(&self) -> usize {
        (self.dim() - 2) / 3
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        trace(&self.0).re
    }

    pub fn population(&self, label: BasisLabel) -> f64 {
        self.0[(label.index(), label.index())].re
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }

    /// Checks Hermiticity, trace and positivity at the given tolerances.
    pub fn check(&self, herm_tol: f64, trace_tol: f64, pos_tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > herm_tol {
            return Err(Error::Numerical(format!(
                "density matrix Hermiticity deviation {dev:.3e} > {herm_tol:.1e}"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::Numerical(format!(
                "density matrix trace {tr:.12} drifted beyond {trace_tol:.1e}"
            )));
        }
        let min = self.min_eigenvalue();
        if min < -pos_tol {
            return Err(Error::Numerical(format!(
                "density matrix eigenvalue {min:.3e} below -{pos_tol:.1e}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// One collective f-excitation at node 1.
    WSeed,
    /// `cos(θ/2)|G⟩ + sin(θ/2)e^{iδ}|f₁⟩`.
    CloneInput,
}

pub fn initial_state(params: &SystemParams, kind: InitialKind) -> Result<StateVector> {
    params.validate()?;
    let dim = params.dim();
    Ok(match kind {
        InitialKind::WSeed => StateVector::basis(dim, BasisLabel::FExc(1)),
        InitialKind::CloneInput => {
            let mut v = CVector::zeros(dim);
            let half = params.theta / 2.0;
            v[BasisLabel::GlobalGround.index()] = c(half.cos());
            v[BasisLabel::FExc(1).index()] = C64::from_polar(half.sin(), params.delta);
            StateVector(v)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn w_seed() {
        let s = initial_state(&SystemParams::dimensionless(3, 100), InitialKind::WSeed).unwrap();
        assert_eq!(s.dim(), 11);
        assert_eq!(s.as_vector()[1], c(1.0));
        assert_eq!(s.norm(), 1.0);
    }

    #[test]
    fn clone_input() {
        let p = SystemParams::dimensionless(3, 100).with_input(0.0, 1.3);
        let s = initial_state(&p, InitialKind::CloneInput).unwrap();
        assert_eq!(s.amplitude(BasisLabel::GlobalGround), c(1.0));
        assert_eq!(s.amplitude(BasisLabel::FExc(1)).norm(), 0.0);
        let p = SystemParams::dimensionless(3, 100).with_input(PI / 2.0, 0.0);
        let s = initial_state(&p, InitialKind::CloneInput).unwrap();
        assert!((s.as_vector()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.as_vector()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_checks() {
        let rho = DensityMatrix::maximally_mixed(11);
        rho.check(1e-10, 1e-8, 1e-8).unwrap();
        let mut bad = rho.clone().into_matrix();
        bad[(0, 0)] += c(0.1);
        assert!(DensityMatrix::new(bad).check(1e-10, 1e-8, 1e-8).is_err());
    }
}
