use crate::error::{Error, Result};
use crate::linalg::{c, CVector};
use crate::model::{BasisLabel, StateVector, SystemParams};

/// Zero-eigenvalue state of `H_I` without cavity components.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkState(StateVector);

impl DarkState {
    pub fn state(&self) -> &StateVector {
        &self.0
    }

    pub fn into_state(self) -> StateVector {
        self.0
    }

    /// `⟨e_x|d⟩`.
    pub fn e_component(&self, node: usize) -> f64 {
        self.0.amplitude(BasisLabel::EExc(node)).re
    }

    pub fn fiber_component(&self) -> f64 {
        self.0.amplitude(BasisLabel::FiberPhoton).re
    }
}

/// For uniform `g` the components are `v_x/𝒩` on every e-state and `−√M·g/𝒩` on
/// the fiber, `𝒩 = √(Σ v_x² + M g²)`. Non-uniform `g_x` require every `g_x > 0`;
/// then `e_x ∝ v_x/(√M g_x)` against a fiber weight of `−1`.
pub fn dark_state(params: &SystemParams) -> Result<DarkState> {
    params.validate()?;
    let n = params.n();
    let gp: Vec<f64> = (1..=n).map(|x| params.g_prime_at(x)).collect();
    let vs: Vec<f64> = (1..=n).map(|x| params.v_at(x)).collect();

    let (e, fiber): (Vec<f64>, f64) = if gp.iter().all(|&x| x == gp[0]) {
        (vs.clone(), -gp[0])
    } else if gp.iter().all(|&x| x > 0.0) {
        (vs.iter().zip(&gp).map(|(v, g)| v / g).collect(), -1.0)
    } else {
        return Err(Error::DarkStateUndefined(
            "a node with zero atom–cavity coupling makes the zero mode degenerate".into(),
        ));
    };
    let norm = (e.iter().map(|x| x * x).sum::<f64>() + fiber * fiber).sqrt();
    if norm == 0.0 {
        return Err(Error::DarkStateUndefined("all couplings vanish".into()));
    }
    let mut v = CVector::zeros(params.dim());
    for (k, ex) in e.iter().enumerate() {
        v[BasisLabel::EExc(k + 1).index()] = c(ex / norm);
    }
    v[BasisLabel::FiberPhoton.index()] = c(fiber / norm);
    Ok(DarkState(StateVector::new(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_h_i;
    use crate::model::NodeField;

    fn paper() -> SystemParams {
        let mut p = SystemParams::dimensionless(3, 100);
        p.g = 1.0;
        p.v = 5.0;
        p
    }

    #[test]
    fn paper_components() {
        let d = dark_state(&paper()).unwrap();
        // 5/√175 and −10/√175
        for k in 1..=3 {
            assert!((d.e_component(k) - 0.377_964_473_009_227_2).abs() < 1e-15);
        }
        assert!((d.fiber_component() + 0.755_928_946_018_454_4).abs() < 1e-15);
        assert!((d.state().norm() - 1.0).abs() < 1e-15);
        for k in 1..=3 {
            assert_eq!(d.state().amplitude(BasisLabel::CavityPhoton(k)).norm(), 0.0);
        }
    }

    #[test]
    fn annihilated_by_measurement_hamiltonian() {
        let p = paper();
        let h = build_h_i(&p).unwrap();
        let d = dark_state(&p).unwrap();
        assert!((&h * d.state().as_vector()).norm() <= 1e-12 * h.norm());
    }

    #[test]
    fn vanishing_atom_coupling_limit() {
        let mut p = paper();
        p.g = 0.0;
        let d = dark_state(&p).unwrap();
        for k in 1..=3 {
            assert!((d.e_component(k) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        assert_eq!(d.fiber_component(), 0.0);
        // the g = 0 measurement Hamiltonian kills it as well
        let h = build_h_i(&p).unwrap();
        assert!((&h * d.state().as_vector()).norm() < 1e-15);
    }

    #[test]
    fn nonuniform_nodes() {
        let mut p = paper();
        p.node_vector_mut(NodeField::G)[0] = 1.1;
        p.node_vector_mut(NodeField::V)[2] = 4.0;
        let d = dark_state(&p).unwrap();
        let h = build_h_i(&p).unwrap();
        assert!((&h * d.state().as_vector()).norm() < 1e-13);
        p.node_vector_mut(NodeField::G)[1] = 0.0;
        assert!(dark_state(&p).is_err());
    }
}
