use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, CMatrix, CVector, C64, I};
use crate::model::{BasisLabel, StateVector, SystemParams};

use super::dark::dark_state;

/// Effective drive `Ω_x ⟨e_x|d⟩` linking `|f_x⟩` to the dark state, for x = 1..N.
pub fn effective_couplings(params: &SystemParams) -> Result<Vec<f64>> {
    let d = dark_state(params)?;
    Ok((1..=params.n())
        .map(|x| params.omega_at(x) * d.e_component(x))
        .collect())
}

/// `Σ_x Ω_x⟨e_x|d⟩ (|f_x⟩⟨d| + |d⟩⟨f_x|)`; for uniform nodes this is
/// `η(Ω₁|f₁⟩⟨d| + Ω Σ_k |f_k⟩⟨d| + h.c.)` with `η = v/√(Nv² + Mg²)`.
pub fn effective_hamiltonian(params: &SystemParams) -> Result<CMatrix> {
    let d = dark_state(params)?;
    let dv = d.state().as_vector();
    let mut h = CMatrix::zeros(params.dim(), params.dim());
    for x in 1..=params.n() {
        let coupling = params.omega_at(x) * d.e_component(x);
        let f = BasisLabel::FExc(x).index();
        for j in 0..params.dim() {
            h[(f, j)] += dv[j].conj() * coupling;
            h[(j, f)] += dv[j] * coupling;
        }
    }
    Ok(h)
}

/// Oscillation frequency of the effective dynamics, `√(Σ_x (Ω_x⟨e_x|d⟩)²)`.
/// Uniform nodes reduce it to `v√(Ω₁² + (N−1)Ω²)/√(Nv² + Mg²)`.
pub fn rabi_mu(params: &SystemParams) -> Result<f64> {
    let cs = effective_couplings(params)?;
    Ok(cs.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Closed-form evolution from `|f₁⟩` under the effective Hamiltonian.
///
/// With the bright state `|b⟩ = Σ c_x|f_x⟩/μ`, `|f₁⟩` rotates as
/// `|f₁⟩ + (c₁/μ)[(cos μt − 1)|b⟩ − i sin μt |d⟩]`.
pub fn analytic_state(params: &SystemParams, t: f64) -> Result<StateVector> {
    let d = dark_state(params)?;
    let cs: Vec<f64> = (1..=params.n())
        .map(|x| params.omega_at(x) * d.e_component(x))
        .collect();
    let mu = cs.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut v = CVector::zeros(params.dim());
    v[BasisLabel::FExc(1).index()] = c(1.0);
    if mu == 0.0 {
        return Ok(StateVector::new(v));
    }
    let (s, co) = (mu * t).sin_cos();
    for (k, ck) in cs.iter().enumerate() {
        v[BasisLabel::FExc(k + 1).index()] += c(cs[0] * ck * (co - 1.0) / (mu * mu));
    }
    let dark_coeff = -I * (cs[0] / mu * s);
    v += d.state().as_vector() * dark_coeff;
    Ok(StateVector::new(v))
}

/// Amplitudes of the evolved state: `A` on `f₁`, `B` on each `f_k`, `C` on each
/// e-state and `D` on the fiber photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZenoAmplitudes {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl ZenoAmplitudes {
    /// `|A|² + (N−1)|B|² + N|C|² + |D|²`.
    pub fn completeness(&self, n_cavities: usize) -> f64 {
        let n = n_cavities as f64;
        self.a.norm_sqr()
            + (n - 1.0) * self.b.norm_sqr()
            + n * self.c.norm_sqr()
            + self.d.norm_sqr()
    }
}

/// Closed-form amplitudes for uniform nodes, with the prefactor
/// `[Ω₁/Ω + (N−1)Ω/Ω₁]⁻¹` applied to `C` and `D` as well as `A` and `B`.
pub fn amplitudes_abcd(params: &SystemParams, t: f64) -> Result<ZenoAmplitudes> {
    params.validate()?;
    if params.omega <= 0.0 {
        return Err(invalid(
            "omega",
            "closed-form amplitudes divide by Ω; use analytic_state",
        ));
    }
    if !params.is_uniform() {
        return Err(invalid(
            "overrides",
            "closed-form amplitudes need uniform nodes",
        ));
    }
    let n = params.n() as f64;
    let (omega, omega1) = (params.omega, params.omega1_resolved());
    let stiff = (n * params.v * params.v + params.g_prime().powi(2)).sqrt();
    if stiff == 0.0 {
        return Err(Error::DarkStateUndefined("all couplings vanish".into()));
    }
    let mu = rabi_mu(params)?;
    let (s, co) = (mu * t).sin_cos();
    if omega1 == 0.0 {
        return Ok(ZenoAmplitudes {
            a: c(1.0),
            b: c(0.0),
            c: c(0.0),
            d: c(0.0),
        });
    }
    let ratio = omega1 / omega + (n - 1.0) * omega / omega1;
    let pref = 1.0 / ratio;
    let drive = (omega1 * omega1 + (n - 1.0) * omega * omega).sqrt() / omega;
    Ok(ZenoAmplitudes {
        a: c(pref * (omega1 / omega * co + (n - 1.0) * omega / omega1)),
        b: c(pref * (co - 1.0)),
        c: -I * (pref * s * drive * params.v / stiff),
        d: I * (pref * s * drive * params.g_prime() / stiff),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolSchedule {
    /// `(√N + 1)·Ω`.
    pub omega1_required: f64,
    pub mu: f64,
    /// `(2n + 1)π/μ`.
    pub t_n: f64,
}

/// W-state timing for the baseline (override-free) parameters.
pub fn protocol_schedule(params: &SystemParams, n: u32) -> Result<ProtocolSchedule> {
    params.validate()?;
    if params.omega <= 0.0 {
        return Err(Error::NoSchedule);
    }
    let mut nominal = params.clone();
    nominal.overrides = Default::default();
    let omega1_required = ((params.n() as f64).sqrt() + 1.0) * params.omega;
    nominal.omega1 = Some(omega1_required);
    let mu = rabi_mu(&nominal)?;
    if mu <= 0.0 {
        return Err(Error::NoSchedule);
    }
    Ok(ProtocolSchedule {
        omega1_required,
        mu,
        t_n: (2 * n + 1) as f64 * PI / mu,
    })
}

/// `(1/√N)(|f₁⟩ + Σ_k |f_k⟩)`.
pub fn w_state(n_cavities: usize) -> StateVector {
    let mut v = CVector::zeros(3 * n_cavities + 2);
    let amp = 1.0 / (n_cavities as f64).sqrt();
    for k in 1..=n_cavities {
        v[BasisLabel::FExc(k).index()] = c(amp);
    }
    StateVector::new(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigen, unitary_propagator};

    fn paper() -> SystemParams {
        let mut p = SystemParams::dimensionless(3, 100);
        p.g = 1.0;
        p.v = 5.0;
        p.omega = 0.5;
        p
    }

    #[test]
    fn effective_coupling_value() {
        let p = paper().with_omega1(1.36603);
        let h = effective_hamiltonian(&p).unwrap();
        let d = dark_state(&p).unwrap();
        let f1 = StateVector::basis(p.dim(), BasisLabel::FExc(1));
        let elem = d.state().as_vector().dotc(&(&h * f1.as_vector()));
        // 1.36603 · 5/√175
        assert!((elem.re - 0.516_310_809_064_794_8).abs() < 1e-12);
        assert!((&h - h.adjoint()).norm() == 0.0);
    }

    #[test]
    fn no_drive_gives_zero_hamiltonian() {
        let p = paper().with_omega(0.0).with_omega1(0.0);
        assert_eq!(effective_hamiltonian(&p).unwrap().norm(), 0.0);
    }

    #[test]
    fn mu_matches_formula_and_spectrum() {
        let p = paper();
        let mu = rabi_mu(&p).unwrap();
        let (o, o1) = (p.omega, p.omega1_resolved());
        let formula =
            p.v * (o1 * o1 - o * o + 3.0 * o * o).sqrt() / (3.0 * p.v * p.v + 100.0f64).sqrt();
        assert!((mu - formula).abs() < 1e-15);
        assert!((mu - 0.581_380_795_272_825_2).abs() < 1e-12, "{mu}");
        let (vals, _) = hermitian_eigen(&effective_hamiltonian(&p).unwrap());
        assert!((vals[vals.len() - 1] - mu).abs() < 1e-12);
        assert!((vals[0] + mu).abs() < 1e-12);
    }

    #[test]
    fn mu_single_drive() {
        let p = paper().with_omega(0.0).with_omega1(0.7);
        let eta = 5.0 / 175f64.sqrt();
        assert!((rabi_mu(&p).unwrap() - eta * 0.7).abs() < 1e-15);
    }

    #[test]
    fn protocol_timing() {
        let s = protocol_schedule(&paper(), 0).unwrap();
        assert!((s.omega1_required / 0.5 - 2.732_050_807_568_877).abs() < 1e-12);
        assert!((s.t_n - 5.403_674_629_664_255).abs() < 1e-12, "{}", s.t_n);
        let s1 = protocol_schedule(&paper(), 1).unwrap();
        assert!((s1.t_n - 3.0 * s.t_n).abs() < 1e-12);
        assert_eq!(
            protocol_schedule(&paper().with_omega(0.0), 0),
            Err(Error::NoSchedule)
        );
    }

    #[test]
    fn analytic_endpoints() {
        let p = paper();
        let s0 = analytic_state(&p, 0.0).unwrap();
        assert_eq!(s0.amplitude(BasisLabel::FExc(1)), c(1.0));
        assert!((s0.norm() - 1.0).abs() < 1e-15);
        let t0 = protocol_schedule(&p, 0).unwrap().t_n;
        let s = analytic_state(&p, t0).unwrap();
        for k in 1..=3 {
            assert!((s.amplitude(BasisLabel::FExc(k)) - c(-1.0 / 3f64.sqrt())).norm() < 1e-12);
        }
        for i in [0, 2, 3, 4, 5, 6, 8, 9] {
            assert!(s.as_vector()[i].norm() < 1e-12);
        }
    }

    #[test]
    fn analytic_matches_propagator() {
        let p = paper();
        let h = effective_hamiltonian(&p).unwrap();
        let f1 = StateVector::basis(p.dim(), BasisLabel::FExc(1));
        for k in 0..50 {
            let t = 0.37 * k as f64;
            let exact = unitary_propagator(&h, t) * f1.as_vector();
            let closed = analytic_state(&p, t).unwrap();
            assert!((exact - closed.as_vector()).norm() < 1e-10);
        }
    }

    #[test]
    fn amplitudes_agree_with_state() {
        let p = paper();
        let t0 = protocol_schedule(&p, 0).unwrap().t_n;
        let z0 = amplitudes_abcd(&p, 0.0).unwrap();
        assert_eq!(
            (z0.a, z0.b, z0.c.norm(), z0.d.norm()),
            (c(1.0), c(0.0), 0.0, 0.0)
        );
        let z = amplitudes_abcd(&p, t0).unwrap();
        assert!((z.a.re + 0.577_350_269_189_625_8).abs() < 1e-12);
        assert!((z.b.re + 0.577_350_269_189_625_8).abs() < 1e-12);
        assert!(z.c.norm() < 1e-12 && z.d.norm() < 1e-12);
        for k in 0..40 {
            let t = 0.21 * k as f64;
            let z = amplitudes_abcd(&p, t).unwrap();
            let s = analytic_state(&p, t).unwrap();
            assert!((z.a - s.amplitude(BasisLabel::FExc(1))).norm() < 1e-12);
            assert!((z.b - s.amplitude(BasisLabel::FExc(3))).norm() < 1e-12);
            assert!((z.c - s.amplitude(BasisLabel::EExc(2))).norm() < 1e-12);
            assert!((z.d - s.amplitude(BasisLabel::FiberPhoton)).norm() < 1e-12);
            assert!((z.completeness(3) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn amplitudes_reject_zero_omega() {
        assert!(amplitudes_abcd(&paper().with_omega(0.0), 1.0).is_err());
    }
}
