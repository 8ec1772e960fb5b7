//! Figures of merit computed from subspace states.

use nalgebra::Matrix2;

use crate::error::{invalid, Result};
use crate::linalg::{c, C64};
use crate::model::{enumerate_basis, BasisLabel, DensityMatrix, StateVector};
use crate::zeno::w_state;

/// Anything that exposes density-matrix elements over the canonical basis.
pub trait SubspaceState {
    fn dim(&self) -> usize;
    fn element(&self, i: usize, j: usize) -> C64;

    fn n_cavities(&self) -> usize {
        (self.dim() - 2) / 3
    }

    fn probability(&self, i: usize) -> f64 {
        self.element(i, i).re
    }
}

impl SubspaceState for StateVector {
    fn dim(&self) -> usize {
        StateVector::dim(self)
    }

    fn element(&self, i: usize, j: usize) -> C64 {
        let v = self.as_vector();
        v[i] * v[j].conj()
    }
}

impl SubspaceState for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }

    fn element(&self, i: usize, j: usize) -> C64 {
        self.as_matrix()[(i, j)]
    }
}

/// Reduced state of one ensemble qubit over `|0⟩_L` (all ground) and `|1⟩_L`
/// (one collective f-excitation). Sub-normalized when the node holds an
/// e-excitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalQubitMatrix(pub Matrix2<C64>);

impl LogicalQubitMatrix {
    pub fn trace(&self) -> f64 {
        (self.0[(0, 0)] + self.0[(1, 1)]).re
    }

    pub fn population0(&self) -> f64 {
        self.0[(0, 0)].re
    }

    pub fn population1(&self) -> f64 {
        self.0[(1, 1)].re
    }

    /// `⟨1|q|0⟩`.
    pub fn coherence(&self) -> C64 {
        self.0[(1, 0)]
    }

    /// Logical `Z` conjugation, which flips the sign of the coherences.
    pub fn frame_flipped(&self) -> Self {
        let mut m = self.0;
        m[(0, 1)] = -m[(0, 1)];
        m[(1, 0)] = -m[(1, 0)];
        Self(m)
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        let herm = (self.0[(0, 1)] - self.0[(1, 0)].conj()).norm() <= tol;
        let (p0, p1) = (self.population0(), self.population1());
        let det = p0 * p1 - self.coherence().norm_sqr();
        herm && p0 >= -tol && p1 >= -tol && det >= -tol && self.trace() <= 1.0 + tol
    }
}

/// Partial trace onto the logical qubit at `node`.
///
/// `|1⟩_L` only pairs with an otherwise empty environment, so the coherence
/// is `ρ(f_node, G)`. Every state without an f- or e-excitation at `node`
/// contributes to `|0⟩_L`.
pub fn reduce_to_logical_qubit<S: SubspaceState + ?Sized>(
    state: &S,
    node: usize,
) -> Result<LogicalQubitMatrix> {
    let n = state.n_cavities();
    if !(1..=n).contains(&node) {
        return Err(invalid("node", format!("{node} outside 1..={n}")));
    }
    let f = BasisLabel::FExc(node).index();
    let e = BasisLabel::EExc(node).index();
    let g = BasisLabel::GlobalGround.index();
    let p0: f64 = (0..state.dim())
        .filter(|&i| i != f && i != e)
        .map(|i| state.probability(i))
        .sum();
    let p1 = state.probability(f);
    let coh = state.element(f, g);
    Ok(LogicalQubitMatrix(Matrix2::new(
        c(p0),
        coh.conj(),
        coh,
        c(p1),
    )))
}

/// Overlap with `(1/√N)(|f₁⟩ + Σ_k |f_k⟩)`.
pub fn w_state_fidelity<S: SubspaceState + ?Sized>(state: &S) -> f64 {
    let n = state.n_cavities();
    let w = w_state(n);
    let wv = w.as_vector();
    let idx: Vec<usize> = (1..=n).map(|k| BasisLabel::FExc(k).index()).collect();
    let mut acc = C64::new(0.0, 0.0);
    for &i in &idx {
        for &j in &idx {
            acc += wv[i].conj() * state.element(i, j) * wv[j];
        }
    }
    acc.re
}

/// `⟨ψ|q|ψ⟩` with `|ψ⟩ = cos(θ/2)|0⟩ + sin(θ/2)e^{iδ}|1⟩`.
pub fn clone_fidelity(
    q: &LogicalQubitMatrix,
    theta: f64,
    delta: f64,
    frame_corrected: bool,
) -> f64 {
    let q = if frame_corrected {
        q.frame_flipped()
    } else {
        *q
    };
    let (s, co) = (theta / 2.0).sin_cos();
    let psi = [c(co), C64::from_polar(s, delta)];
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += psi[i].conj() * q.0[(i, j)] * psi[j];
        }
    }
    acc.re
}

/// Per-basis-state probabilities in canonical order.
pub fn populations<S: SubspaceState + ?Sized>(state: &S) -> Vec<(BasisLabel, f64)> {
    let basis = enumerate_basis(state.n_cavities()).expect("state has at least two nodes");
    basis
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, state.probability(i)))
        .collect()
}
