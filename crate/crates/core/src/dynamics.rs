//! Unitary, Lindblad and conditional (non-Hermitian) propagation of the
//! subspace dynamics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, expm, hermitian_eigen, norm_inf, unitary_propagator, CMatrix, CVector, C64,
};
use crate::model::{CollapseOp, DensityMatrix, StateVector};

pub const NORM_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Largest admissible `dt·‖H‖` for fixed-step integration.
pub const MAX_STEP_NORM: f64 = 0.1;
/// `dt·max(‖H‖, max rate)` used when no step is given.
pub const DEFAULT_STEP_NORM: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Fixed-step classical fourth-order Runge–Kutta.
    Rk4,
    /// Scaling-and-squaring matrix exponential (time-independent generators).
    Expm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step size; `None` picks `0.02 / max(‖H‖, max rate)`.
    pub dt: Option<f64>,
    /// Cap on norm or trace drift per unit time, on top of the fixed tolerances.
    pub error_cap: Option<f64>,
}

impl IntegratorConfig {
    pub fn expm() -> Self {
        Self {
            method: Method::Expm,
            dt: None,
            error_cap: None,
        }
    }

    pub fn rk4() -> Self {
        Self {
            method: Method::Rk4,
            dt: None,
            error_cap: None,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    /// Step for a generator of scale `scale`, validated against `dt·scale ≤ 0.1`.
    pub fn step_for(&self, scale: f64) -> Result<f64> {
        match self.dt {
            Some(dt) => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "dt",
                        reason: format!("{dt} must be positive"),
                    });
                }
                if dt * scale > MAX_STEP_NORM {
                    return Err(Error::InvalidParameter {
                        name: "dt",
                        reason: format!("dt·‖H‖ = {:.3} exceeds {MAX_STEP_NORM}", dt * scale),
                    });
                }
                Ok(dt)
            }
            None if scale > 0.0 => Ok(DEFAULT_STEP_NORM / scale),
            None => Ok(f64::INFINITY),
        }
    }

    fn drift_tol(&self, base: f64, t: f64) -> f64 {
        match self.error_cap {
            Some(cap) => base.min(cap * t.max(f64::MIN_POSITIVE)),
            None => base,
        }
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::expm()
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("{t} must be finite and ≥ 0"),
        });
    }
    Ok(())
}

fn substeps(span: f64, dt: f64) -> (usize, f64) {
    if span <= 0.0 {
        return (0, 0.0);
    }
    let n = (span / dt).ceil().max(1.0) as usize;
    (n, span / n as f64)
}

fn rk4_schrodinger(h: &CMatrix, psi: &CVector, span: f64, dt: f64) -> CVector {
    let mi = C64::new(0.0, -1.0);
    let rhs = |v: &CVector| (h * v) * mi;
    let (n, step) = substeps(span, dt);
    let mut v = psi.clone();
    let half = c(step / 2.0);
    let full = c(step);
    let sixth = c(step / 6.0);
    for _ in 0..n {
        let k1 = rhs(&v);
        let k2 = rhs(&(&v + &k1 * half));
        let k3 = rhs(&(&v + &k2 * half));
        let k4 = rhs(&(&v + &k3 * full));
        v += (k1 + (k2 + k3) * c(2.0) + k4) * sixth;
    }
    v
}

/// `ψ(t) = exp(−iHt)ψ₀`.
pub fn evolve_schrodinger(
    h: &CMatrix,
    psi0: &StateVector,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<StateVector> {
    check_dims(h.nrows(), psi0.dim())?;
    check_time(t)?;
    let v0 = psi0.as_vector();
    let (out, dt) = match cfg.method {
        Method::Expm => (unitary_propagator(h, t) * v0, None),
        Method::Rk4 => {
            let dt = cfg.step_for(norm_inf(h))?;
            (rk4_schrodinger(h, v0, t, dt), Some(dt))
        }
    };
    let drift = (out.norm() - v0.norm()).abs();
    if drift > cfg.drift_tol(NORM_TOL, t) {
        return Err(Error::Numerical(format!(
            "norm drift {drift:.3e} after t = {t} (step {})",
            dt.map_or("exact".to_string(), |d| format!("{d:.3e}"))
        )));
    }
    Ok(StateVector::new(out))
}

/// Eigen-decomposed propagator for evaluating one Hamiltonian at many times.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl SpectralPropagator {
    pub fn new(h: &CMatrix) -> Self {
        let (values, vectors) = hermitian_eigen(h);
        Self { values, vectors }
    }

    pub fn evolve(&self, psi0: &StateVector, t: f64) -> StateVector {
        let mut coeffs = self.vectors.adjoint() * psi0.as_vector();
        for (z, &l) in coeffs.iter_mut().zip(&self.values) {
            *z *= C64::new(0.0, -l * t).exp();
        }
        StateVector::new(&self.vectors * coeffs)
    }
}

/// Collapse operators pre-multiplied for the dissipator.
struct Dissipator {
    /// `H − (i/2) Σ r L†L`.
    h_eff: CMatrix,
    jumps: Vec<Jump>,
}

enum Jump {
    /// `L = a|row⟩⟨col|`, stored as `rate·|a|²`.
    Single {
        weight: f64,
        row: usize,
        col: usize,
    },
    Dense {
        rate: f64,
        l: CMatrix,
        ld: CMatrix,
    },
}

fn single_entry(m: &CMatrix) -> Option<(usize, usize, C64)> {
    let mut found = None;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if z != C64::new(0.0, 0.0) {
                if found.is_some() {
                    return None;
                }
                found = Some((i, j, z));
            }
        }
    }
    found
}

impl Dissipator {
    fn new(h: &CMatrix, ops: &[CollapseOp]) -> Self {
        let mut h_eff = h.clone();
        let mut jumps = Vec::with_capacity(ops.len());
        for op in ops {
            let ld = op.jump.adjoint();
            h_eff -= (&ld * &op.jump) * C64::new(0.0, 0.5 * op.rate);
            jumps.push(match single_entry(&op.jump) {
                Some((row, col, z)) => Jump::Single {
                    weight: op.rate * z.norm_sqr(),
                    row,
                    col,
                },
                None => Jump::Dense {
                    rate: op.rate,
                    l: op.jump.clone(),
                    ld,
                },
            });
        }
        Self { h_eff, jumps }
    }

    fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let a = &self.h_eff * rho;
        let mut out = (&a - a.adjoint()) * C64::new(0.0, -1.0);
        for jump in &self.jumps {
            match jump {
                Jump::Single { weight, row, col } => {
                    out[(*row, *row)] += rho[(*col, *col)] * *weight
                }
                Jump::Dense { rate, l, ld } => out += (l * rho * ld) * c(*rate),
            }
        }
        out
    }

    fn step_rk4(&self, rho: &CMatrix, step: f64) -> CMatrix {
        let half = c(step / 2.0);
        let k1 = self.rhs(rho);
        let k2 = self.rhs(&(rho + &k1 * half));
        let k3 = self.rhs(&(rho + &k2 * half));
        let k4 = self.rhs(&(rho + &k3 * c(step)));
        let mut next = rho + (k1 + (k2 + k3) * c(2.0) + k4) * c(step / 6.0);
        // keep the stored matrix exactly Hermitian
        next = (&next + next.adjoint()) * c(0.5);
        next
    }

    /// Row-major vectorized generator: `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`.
    fn superoperator(&self) -> CMatrix {
        let d = self.h_eff.nrows();
        let id = CMatrix::identity(d, d);
        let mi = C64::new(0.0, -1.0);
        let mut s =
            self.h_eff.kronecker(&id) * mi - id.kronecker(&self.h_eff.adjoint().transpose()) * mi;
        for jump in &self.jumps {
            match jump {
                Jump::Single { weight, row, col } => {
                    s[(row * d + row, col * d + col)] += c(*weight)
                }
                Jump::Dense { rate, l, ld } => s += l.kronecker(&ld.transpose()) * c(*rate),
            }
        }
        s
    }
}

fn rate_scale(h: &CMatrix, ops: &[CollapseOp]) -> f64 {
    ops.iter().map(|o| o.rate).fold(norm_inf(h), f64::max)
}

fn check_density(rho: &DensityMatrix, t: f64, cfg: &IntegratorConfig, step: &str) -> Result<()> {
    rho.check(HERMITICITY_TOL, cfg.drift_tol(TRACE_TOL, t), POSITIVITY_TOL)
        .map_err(|e| match e {
            Error::Numerical(msg) => Error::Numerical(format!("{msg} at t = {t} (step {step})")),
            other => other,
        })
}

/// Samples of `dρ/dt = −i[H,ρ] + Σ r(LρL† − ½{L†L, ρ})` at ascending `times`.
pub fn lindblad_trajectory(
    h: &CMatrix,
    ops: &[CollapseOp],
    rho0: &DensityMatrix,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<DensityMatrix>> {
    check_dims(h.nrows(), rho0.dim())?;
    for op in ops {
        check_dims(h.nrows(), op.jump.nrows())?;
        if op.rate.is_nan() || op.rate < 0.0 {
            return Err(Error::InvalidParameter {
                name: "rate",
                reason: format!("{} has negative rate {}", op.label, op.rate),
            });
        }
    }
    for &t in times {
        check_time(t)?;
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter {
            name: "times",
            reason: "sample times must be ascending".into(),
        });
    }
    let diss = Dissipator::new(h, ops);
    let d = h.nrows();
    let mut out = Vec::with_capacity(times.len());
    match cfg.method {
        Method::Rk4 => {
            let dt = cfg.step_for(rate_scale(h, ops))?;
            let mut rho = rho0.as_matrix().clone();
            let mut now = 0.0;
            for &t in times {
                let (n, step) = substeps(t - now, dt);
                for _ in 0..n {
                    rho = diss.step_rk4(&rho, step);
                }
                now = t;
                let sample = DensityMatrix::new(rho.clone());
                check_density(&sample, t, cfg, &format!("{dt:.3e}"))?;
                out.push(sample);
            }
        }
        Method::Expm => {
            let s = diss.superoperator();
            let v0 = CVector::from_iterator(d * d, rho0.as_matrix().transpose().iter().copied());
            for &t in times {
                let v = expm(&(&s * c(t))) * &v0;
                let m = CMatrix::from_row_slice(d, d, v.as_slice());
                let m = (&m + m.adjoint()) * c(0.5);
                let sample = DensityMatrix::new(m);
                check_density(&sample, t, cfg, "exact")?;
                out.push(sample);
            }
        }
    }
    Ok(out)
}

pub fn evolve_lindblad(
    h: &CMatrix,
    ops: &[CollapseOp],
    rho0: &DensityMatrix,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<DensityMatrix> {
    Ok(lindblad_trajectory(h, ops, rho0, &[t], cfg)?.remove(0))
}

/// No-jump evolution under `H − (i/2)Σ r L†L`; the result is left unnormalized.
pub fn evolve_conditional(
    h: &CMatrix,
    ops: &[CollapseOp],
    psi0: &StateVector,
    t: f64,
) -> Result<StateVector> {
    check_dims(h.nrows(), psi0.dim())?;
    check_time(t)?;
    let diss = Dissipator::new(h, ops);
    let u = expm(&(&diss.h_eff * C64::new(0.0, -t)));
    let out = u * psi0.as_vector();
    if out.norm() > psi0.norm() * (1.0 + NORM_TOL) {
        return Err(Error::Numerical("conditional evolution gained norm".into()));
    }
    Ok(StateVector::new(out))
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn state_fidelity(rho: &DensityMatrix, psi: &StateVector) -> f64 {
    let v = psi.as_vector();
    v.dotc(&(rho.as_matrix() * v)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        build_collapse_ops, build_h_total, initial_state, BasisLabel, InitialKind, SystemParams,
    };
    use crate::zeno::{analytic_state, protocol_schedule};
    use std::f64::consts::PI;

    fn two_level(omega: f64) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0), c(omega), c(omega), c(0.0)])
    }

    #[test]
    fn rabi_half_period() {
        let omega = 0.7;
        let h = two_level(omega);
        let psi0 = StateVector::new(CVector::from_vec(vec![c(1.0), c(0.0)]));
        for cfg in [IntegratorConfig::expm(), IntegratorConfig::rk4()] {
            let out = evolve_schrodinger(&h, &psi0, PI / (2.0 * omega), &cfg).unwrap();
            let target = out.as_vector()[1];
            assert!((target.norm_sqr() - 1.0).abs() < 1e-8);
            assert!((target - C64::new(0.0, -1.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let h = two_level(1.0);
        let psi0 = StateVector::new(CVector::from_vec(vec![c(0.6), C64::new(0.0, 0.8)]));
        for cfg in [IntegratorConfig::expm(), IntegratorConfig::rk4()] {
            assert_eq!(evolve_schrodinger(&h, &psi0, 0.0, &cfg).unwrap(), psi0);
        }
    }

    #[test]
    fn step_heuristic_enforced() {
        let h = two_level(10.0);
        let psi0 = StateVector::new(CVector::from_vec(vec![c(1.0), c(0.0)]));
        let cfg = IntegratorConfig::rk4().with_dt(0.1);
        assert!(evolve_schrodinger(&h, &psi0, 1.0, &cfg).is_err());
        assert!(IntegratorConfig::rk4().with_dt(-1.0).step_for(1.0).is_err());
    }

    #[test]
    fn full_model_tracks_zeno_limit() {
        let mut p = SystemParams::dimensionless(3, 100);
        p.g = 1.0;
        p.v = 5.0;
        p.omega = 0.01;
        let h = build_h_total(&p).unwrap();
        let psi0 = initial_state(&p, InitialKind::WSeed).unwrap();
        let t0 = protocol_schedule(&p, 0).unwrap().t_n;
        let prop = SpectralPropagator::new(&h);
        for k in 0..=20 {
            let t = t0 * k as f64 / 20.0;
            let full = prop.evolve(&psi0, t);
            let eff = analytic_state(&p, t).unwrap();
            assert!(full.overlap(&eff).norm_sqr() >= 0.999);
        }
    }

    #[test]
    fn spectral_matches_expm() {
        let p = SystemParams::dimensionless(4, 50).with_omega(0.1);
        let h = build_h_total(&p).unwrap();
        let psi0 = initial_state(&p, InitialKind::CloneInput).unwrap();
        let prop = SpectralPropagator::new(&h);
        for t in [0.0, 1.3, 17.0, 250.0] {
            let a = prop.evolve(&psi0, t);
            let b = evolve_schrodinger(&h, &psi0, t, &IntegratorConfig::expm()).unwrap();
            assert!((a.as_vector() - b.as_vector()).norm() < 1e-10);
        }
    }

    #[test]
    fn closed_limit_of_lindblad() {
        let p = SystemParams::dimensionless(3, 100);
        let h = build_h_total(&p).unwrap();
        let psi0 = initial_state(&p, InitialKind::WSeed).unwrap();
        let t = 20.0;
        let rho =
            evolve_lindblad(&h, &[], &psi0.to_density(), t, &IntegratorConfig::rk4()).unwrap();
        let psi = evolve_schrodinger(&h, &psi0, t, &IntegratorConfig::expm()).unwrap();
        assert!((rho.as_matrix() - psi.to_density().as_matrix()).norm() < 1e-8);
    }

    #[test]
    fn cavity_decay_is_exponential() {
        let p = SystemParams::dimensionless(3, 100).with_rates(0.3, 0.0, 0.0);
        let h = CMatrix::zeros(p.dim(), p.dim());
        let ops = build_collapse_ops(&p).unwrap();
        let rho0 = StateVector::basis(p.dim(), BasisLabel::CavityPhoton(1)).to_density();
        let times: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let traj = lindblad_trajectory(&h, &ops, &rho0, &times, &IntegratorConfig::rk4()).unwrap();
        for (rho, t) in traj.iter().zip(&times) {
            let pop = rho.population(BasisLabel::CavityPhoton(1));
            let exact = (-0.3 * t).exp();
            assert!(((pop - exact) / exact).abs() < 1e-6);
            assert!((rho.population(BasisLabel::GlobalGround) - (1.0 - exact)).abs() < 1e-6);
        }
    }

    #[test]
    fn superoperator_route_matches_rk4() {
        let p = SystemParams::dimensionless(3, 100).with_rates(0.01, 0.02, 0.005);
        let h = build_h_total(&p).unwrap();
        let ops = build_collapse_ops(&p).unwrap();
        let rho0 = initial_state(&p, InitialKind::CloneInput)
            .unwrap()
            .to_density();
        let a = evolve_lindblad(&h, &ops, &rho0, 30.0, &IntegratorConfig::rk4()).unwrap();
        let b = evolve_lindblad(&h, &ops, &rho0, 30.0, &IntegratorConfig::expm()).unwrap();
        assert!((a.as_matrix() - b.as_matrix()).norm() < 1e-8);
    }

    #[test]
    fn dense_jump_routes_agree() {
        let h = two_level(0.4);
        let jump = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        let ops = [CollapseOp {
            label: "dephase".into(),
            rate: 0.2,
            jump,
        }];
        let rho0 = StateVector::new(CVector::from_vec(vec![c(1.0), c(0.0)])).to_density();
        let a = evolve_lindblad(
            &h,
            &ops,
            &rho0,
            12.0,
            &IntegratorConfig::rk4().with_dt(0.005),
        )
        .unwrap();
        let b = evolve_lindblad(&h, &ops, &rho0, 12.0, &IntegratorConfig::expm()).unwrap();
        assert!((a.as_matrix() - b.as_matrix()).norm() < 1e-9);
        assert!(a.as_matrix()[(0, 1)].norm() < 0.5);
    }

    #[test]
    fn conditional_norm_is_no_jump_probability() {
        let p = SystemParams::dimensionless(3, 100).with_rates(0.3, 0.0, 0.0);
        let h = CMatrix::zeros(p.dim(), p.dim());
        let ops = build_collapse_ops(&p).unwrap();
        let psi0 = StateVector::basis(p.dim(), BasisLabel::CavityPhoton(2));
        let out = evolve_conditional(&h, &ops, &psi0, 2.0).unwrap();
        assert!((out.norm().powi(2) - (-0.6f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn fidelity_cases() {
        let psi = StateVector::basis(11, BasisLabel::FExc(2));
        assert!((state_fidelity(&psi.to_density(), &psi) - 1.0).abs() < 1e-15);
        let other = StateVector::basis(11, BasisLabel::EExc(2));
        assert_eq!(state_fidelity(&other.to_density(), &psi), 0.0);
        let mixed = DensityMatrix::maximally_mixed(11);
        assert!((state_fidelity(&mixed, &psi) - 1.0 / 11.0).abs() < 1e-15);
    }
}
