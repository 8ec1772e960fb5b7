use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// How numeric inputs were expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitMode {
    /// Collective coupling `g′ = √M·g` is the unit of frequency.
    Dimensionless,
    /// Angular frequencies in rad/µs converted from `X/2π` MHz inputs; times in µs.
    Physical,
}

/// `X/2π = f` MHz to an angular frequency in rad/µs.
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz
}

/// Optional per-node values. Each vector, when present, has one entry per node
/// (index 0 is node 1) and replaces the uniform baseline for that quantity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeOverrides {
    pub g: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
    pub omega: Option<Vec<f64>>,
    pub kappa: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
}

impl NodeOverrides {
    pub fn is_empty(&self) -> bool {
        self.g.is_none()
            && self.v.is_none()
            && self.omega.is_none()
            && self.kappa.is_none()
            && self.gamma.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n_cavities: usize,
    pub m_atoms: usize,
    /// Per-atom atom–cavity coupling.
    pub g: f64,
    /// Cavity–fiber coupling.
    pub v: f64,
    /// Drive at nodes 2..N.
    pub omega: f64,
    /// Drive at node 1; `None` selects the W condition `(√N + 1)·Ω`.
    pub omega1: Option<f64>,
    pub kappa: f64,
    pub gamma: f64,
    pub beta: f64,
    pub theta: f64,
    pub delta: f64,
    /// Fraction of `γ` routed e→f instead of e→g.
    pub decay_to_f: f64,
    pub unit_mode: UnitMode,
    pub overrides: NodeOverrides,
}

impl SystemParams {
    /// Dimensionless parameters with `g′ = 1`, `v = 0.5 g′`, `Ω = 0.05 g′`, no
    /// dissipation and `θ = π/2`.
    pub fn dimensionless(n_cavities: usize, m_atoms: usize) -> Self {
        Self {
            n_cavities,
            m_atoms,
            g: 1.0 / (m_atoms.max(1) as f64).sqrt(),
            v: 0.5,
            omega: 0.05,
            omega1: None,
            kappa: 0.0,
            gamma: 0.0,
            beta: 0.0,
            theta: PI / 2.0,
            delta: 0.0,
            decay_to_f: 0.0,
            unit_mode: UnitMode::Dimensionless,
            overrides: NodeOverrides::default(),
        }
    }

    pub fn with_v(mut self, v: f64) -> Self {
        self.v = v;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_omega1(mut self, omega1: f64) -> Self {
        self.omega1 = Some(omega1);
        self
    }

    pub fn with_rates(mut self, kappa: f64, gamma: f64, beta: f64) -> Self {
        self.kappa = kappa;
        self.gamma = gamma;
        self.beta = beta;
        self
    }

    pub fn with_input(mut self, theta: f64, delta: f64) -> Self {
        self.theta = theta;
        self.delta = delta;
        self
    }

    pub fn n(&self) -> usize {
        self.n_cavities
    }

    pub fn dim(&self) -> usize {
        3 * self.n_cavities + 2
    }

    /// Collective coupling `√M·g`.
    pub fn g_prime(&self) -> f64 {
        (self.m_atoms as f64).sqrt() * self.g
    }

    pub fn omega1_resolved(&self) -> f64 {
        self.omega1
            .unwrap_or_else(|| ((self.n_cavities as f64).sqrt() + 1.0) * self.omega)
    }

    fn node_value(over: &Option<Vec<f64>>, node: usize, base: f64) -> f64 {
        over.as_ref().map_or(base, |v| v[node - 1])
    }

    /// Per-atom coupling at `node` (1-based).
    pub fn g_at(&self, node: usize) -> f64 {
        Self::node_value(&self.overrides.g, node, self.g)
    }

    pub fn v_at(&self, node: usize) -> f64 {
        Self::node_value(&self.overrides.v, node, self.v)
    }

    pub fn omega_at(&self, node: usize) -> f64 {
        let base = if node == 1 {
            self.omega1_resolved()
        } else {
            self.omega
        };
        Self::node_value(&self.overrides.omega, node, base)
    }

    pub fn kappa_at(&self, node: usize) -> f64 {
        Self::node_value(&self.overrides.kappa, node, self.kappa)
    }

    pub fn gamma_at(&self, node: usize) -> f64 {
        Self::node_value(&self.overrides.gamma, node, self.gamma)
    }

    /// Collective coupling `√M·g_x` at `node`.
    pub fn g_prime_at(&self, node: usize) -> f64 {
        (self.m_atoms as f64).sqrt() * self.g_at(node)
    }

    /// All per-node couplings and drives equal their baselines.
    pub fn is_uniform(&self) -> bool {
        (1..=self.n_cavities).all(|x| {
            self.g_at(x) == self.g
                && self.v_at(x) == self.v
                && (x == 1 || self.omega_at(x) == self.omega)
        }) && self.omega_at(1) == self.omega1_resolved()
    }

    /// Star couplers with two arms are outside the modelled regime.
    pub fn is_extrapolated(&self) -> bool {
        self.n_cavities < 3
    }

    /// θ beyond `[0, π/2]`, where the closed-form clone fidelity is stated.
    pub fn theta_outside_formula_range(&self) -> bool {
        self.theta > PI / 2.0 + 1e-12
    }

    /// Materialize a per-node vector from the current baseline.
    pub fn node_vector_mut(&mut self, which: NodeField) -> &mut Vec<f64> {
        let n = self.n_cavities;
        let base: Vec<f64> = (1..=n)
            .map(|x| match which {
                NodeField::G => self.g_at(x),
                NodeField::V => self.v_at(x),
                NodeField::Omega => self.omega_at(x),
                NodeField::Kappa => self.kappa_at(x),
                NodeField::Gamma => self.gamma_at(x),
            })
            .collect();
        let slot = match which {
            NodeField::G => &mut self.overrides.g,
            NodeField::V => &mut self.overrides.v,
            NodeField::Omega => &mut self.overrides.omega,
            NodeField::Kappa => &mut self.overrides.kappa,
            NodeField::Gamma => &mut self.overrides.gamma,
        };
        slot.get_or_insert(base)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cavities < 2 {
            return Err(invalid("n_cavities", format!("{} < 2", self.n_cavities)));
        }
        if self.m_atoms < 1 {
            return Err(invalid("m_atoms", "must be at least 1"));
        }
        let scalars = [
            ("g", self.g),
            ("v", self.v),
            ("omega", self.omega),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("beta", self.beta),
        ];
        for (name, value) in scalars {
            nonneg(name, value)?;
        }
        if let Some(o1) = self.omega1 {
            nonneg("omega1", o1)?;
        }
        let lists = [
            ("g[node]", &self.overrides.g),
            ("v[node]", &self.overrides.v),
            ("omega[node]", &self.overrides.omega),
            ("kappa[node]", &self.overrides.kappa),
            ("gamma[node]", &self.overrides.gamma),
        ];
        for (name, list) in lists {
            if let Some(values) = list {
                if values.len() != self.n_cavities {
                    return Err(invalid(
                        name,
                        format!("{} entries for {} nodes", values.len(), self.n_cavities),
                    ));
                }
                for &value in values {
                    nonneg(name, value)?;
                }
            }
        }
        let any_g = (1..=self.n_cavities).any(|x| self.g_at(x) > 0.0);
        let any_v = (1..=self.n_cavities).any(|x| self.v_at(x) > 0.0);
        if !any_g && !any_v {
            return Err(invalid(
                "g",
                "g and v are both zero; the network is degenerate",
            ));
        }
        if !(0.0..=PI).contains(&self.theta) {
            return Err(invalid("theta", format!("{} outside [0, π]", self.theta)));
        }
        if !(0.0..2.0 * PI).contains(&self.delta) {
            return Err(invalid("delta", format!("{} outside [0, 2π)", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.decay_to_f) {
            return Err(invalid("decay_to_f", "branching fraction outside [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeField {
    G,
    V,
    Omega,
    Kappa,
    Gamma,
}

fn nonneg(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(invalid(name, format!("{value} must be finite and ≥ 0")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = SystemParams::dimensionless(3, 100);
        p.validate().unwrap();
        assert!((p.g_prime() - 1.0).abs() < 1e-15);
        assert!((p.omega1_resolved() / p.omega - (3f64.sqrt() + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SystemParams::dimensionless(1, 100).validate().is_err());
        assert!(SystemParams::dimensionless(3, 0).validate().is_err());
        let mut p = SystemParams::dimensionless(3, 100);
        p.g = 0.0;
        p.v = 0.0;
        assert!(p.validate().is_err());
        let p = SystemParams::dimensionless(3, 100).with_rates(-1.0, 0.0, 0.0);
        assert!(p.validate().is_err());
        let p = SystemParams::dimensionless(3, 100).with_input(4.0, 0.0);
        assert!(p.validate().is_err());
        let p = SystemParams::dimensionless(3, 100).with_input(1.0, 2.0 * PI);
        assert!(p.validate().is_err());
        let mut p = SystemParams::dimensionless(3, 100);
        p.overrides.g = Some(vec![0.1, 0.1]);
        assert!(p.validate().is_err());
    }

    #[test]
    fn overrides_take_precedence() {
        let mut p = SystemParams::dimensionless(3, 100);
        p.node_vector_mut(NodeField::G)[0] *= 1.1;
        assert!((p.g_at(1) - 0.11).abs() < 1e-15);
        assert_eq!(p.g_at(2), p.g);
        assert!(!p.is_uniform());
        let omega1 = p.omega1_resolved();
        p.node_vector_mut(NodeField::Omega);
        assert_eq!(p.omega_at(1), omega1);
    }

    #[test]
    fn flags() {
        assert!(SystemParams::dimensionless(2, 10).is_extrapolated());
        let p = SystemParams::dimensionless(3, 10).with_input(2.0, 0.0);
        assert!(p.theta_outside_formula_range());
    }
}
