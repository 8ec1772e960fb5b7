//! Independent construction of the subspace Hamiltonian from individual atoms.
//!
//! Every atom is a three-level system and every cavity and the fiber are
//! bosonic modes; product configurations with at most one excitation are
//! enumerated and the Hamiltonian is applied term by term through ladder
//! operators. Projecting onto symmetric (Dicke) states must reproduce the
//! collective model.

use std::collections::HashMap;

use zenoclone_core::linalg::{c, CMatrix};
use zenoclone_core::{BasisLabel, Result, SystemParams};

const G: u8 = 0;
const E: u8 = 1;
const F: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Config {
    /// `atoms[x][j]` is the level of atom `j` at node `x`.
    atoms: Vec<Vec<u8>>,
    cavities: Vec<u8>,
    fiber: u8,
}

impl Config {
    fn excitations(&self) -> usize {
        self.atoms.iter().flatten().filter(|&&l| l != G).count()
            + self.cavities.iter().map(|&n| n as usize).sum::<usize>()
            + self.fiber as usize
    }
}

fn enumerate(n: usize, m: usize) -> Vec<Config> {
    let vacuum = Config {
        atoms: vec![vec![G; m]; n],
        cavities: vec![0; n],
        fiber: 0,
    };
    let mut out = vec![vacuum.clone()];
    for x in 0..n {
        for j in 0..m {
            for level in [E, F] {
                let mut cfg = vacuum.clone();
                cfg.atoms[x][j] = level;
                out.push(cfg);
            }
        }
        let mut cfg = vacuum.clone();
        cfg.cavities[x] = 1;
        out.push(cfg);
    }
    let mut cfg = vacuum;
    cfg.fiber = 1;
    out.push(cfg);
    out
}

/// `|to⟩⟨from|` on one atom.
fn sigma(cfg: &Config, x: usize, j: usize, to: u8, from: u8) -> Option<(Config, f64)> {
    (cfg.atoms[x][j] == from).then(|| {
        let mut next = cfg.clone();
        next.atoms[x][j] = to;
        (next, 1.0)
    })
}

fn lower(n: u8) -> Option<(u8, f64)> {
    (n > 0).then(|| (n - 1, (n as f64).sqrt()))
}

fn raise(n: u8) -> (u8, f64) {
    (n + 1, ((n + 1) as f64).sqrt())
}

/// `H|cfg⟩` as a list of (configuration, amplitude).
fn apply(p: &SystemParams, m: usize, cfg: &Config) -> Vec<(Config, f64)> {
    let n = p.n();
    let mut out = Vec::new();
    for x in 0..n {
        let node = x + 1;
        let (om, g, v) = (p.omega_at(node), p.g_at(node), p.v_at(node));
        for j in 0..m {
            // Ω(|e⟩⟨f| + |f⟩⟨e|)
            for (to, from) in [(E, F), (F, E)] {
                if let Some((next, a)) = sigma(cfg, x, j, to, from) {
                    out.push((next, om * a));
                }
            }
            // g(a σ_eg + a† σ_ge)
            if let Some((mut next, a)) = sigma(cfg, x, j, E, G) {
                if let Some((k, b)) = lower(next.cavities[x]) {
                    next.cavities[x] = k;
                    out.push((next, g * a * b));
                }
            }
            if let Some((mut next, a)) = sigma(cfg, x, j, G, E) {
                let (k, b) = raise(next.cavities[x]);
                next.cavities[x] = k;
                out.push((next, g * a * b));
            }
        }
        // v(b† a + a† b)
        if let Some((k, a)) = lower(cfg.cavities[x]) {
            let (f, b) = raise(cfg.fiber);
            let mut next = cfg.clone();
            next.cavities[x] = k;
            next.fiber = f;
            out.push((next, v * a * b));
        }
        if let Some((f, a)) = lower(cfg.fiber) {
            let (k, b) = raise(cfg.cavities[x]);
            let mut next = cfg.clone();
            next.cavities[x] = k;
            next.fiber = f;
            out.push((next, v * a * b));
        }
    }
    out
}

/// Largest deviation between the collective Hamiltonian and the projected
/// brute-force one, together with the leakage `‖(1 − VV†)HV‖` out of the
/// symmetric subspace.
pub fn dicke_deviation(p: &SystemParams, h_model: &CMatrix) -> Result<(f64, f64)> {
    let (n, m) = (p.n(), p.m_atoms);
    let configs = enumerate(n, m);
    let index: HashMap<Config, usize> = configs
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let big = configs.len();
    let mut h = CMatrix::zeros(big, big);
    for (col, cfg) in configs.iter().enumerate() {
        for (next, amp) in apply(p, m, cfg) {
            assert!(next.excitations() <= 1, "excitation number not conserved");
            let row = index[&next];
            h[(row, col)] += c(amp);
        }
    }

    let dim = p.dim();
    let mut iso = CMatrix::zeros(big, dim);
    let vacuum = &configs[0];
    let amp = 1.0 / (m as f64).sqrt();
    for col in 0..dim {
        let label = BasisLabel::from_index(n, col).expect("index in range");
        match label {
            BasisLabel::GlobalGround => iso[(0, col)] = c(1.0),
            BasisLabel::FExc(x) | BasisLabel::EExc(x) => {
                let level = if matches!(label, BasisLabel::FExc(_)) {
                    F
                } else {
                    E
                };
                for j in 0..m {
                    let mut cfg = vacuum.clone();
                    cfg.atoms[x - 1][j] = level;
                    iso[(index[&cfg], col)] = c(amp);
                }
            }
            BasisLabel::CavityPhoton(x) => {
                let mut cfg = vacuum.clone();
                cfg.cavities[x - 1] = 1;
                iso[(index[&cfg], col)] = c(1.0);
            }
            BasisLabel::FiberPhoton => {
                let mut cfg = vacuum.clone();
                cfg.fiber = 1;
                iso[(index[&cfg], col)] = c(1.0);
            }
        }
    }
    let hv = &h * &iso;
    let projected = iso.adjoint() * &hv;
    let deviation = (&projected - h_model)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let leakage = (&hv - &iso * &projected).norm();
    Ok((deviation, leakage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use zenoclone_core::model::build_h_total;

    #[test]
    fn two_atoms_give_root_two() {
        let mut p = SystemParams::dimensionless(3, 2);
        p.g = 1.0;
        let h = build_h_total(&p).unwrap();
        let (dev, leak) = dicke_deviation(&p, &h).unwrap();
        assert!(dev < 1e-12 && leak < 1e-12);
        assert!(
            (h[(
                BasisLabel::EExc(1).index(),
                BasisLabel::CavityPhoton(1).index()
            )]
                .re
                - 2f64.sqrt())
            .abs()
                < 1e-15
        );
    }

    #[test]
    fn wrong_collective_factor_is_detected() {
        let mut p = SystemParams::dimensionless(3, 3);
        p.g = 0.7;
        let mut h = build_h_total(&p).unwrap();
        let (e, cav) = (
            BasisLabel::EExc(2).index(),
            BasisLabel::CavityPhoton(2).index(),
        );
        h[(e, cav)] = c(0.7);
        h[(cav, e)] = c(0.7);
        assert!(dicke_deviation(&p, &h).unwrap().0 > 0.5);
    }
}
