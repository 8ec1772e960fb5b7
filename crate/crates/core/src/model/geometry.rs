use serde::Serialize;

use crate::error::{invalid, Result};

/// Mean interatomic spacing `d ≈ 4.1 M^{-1/2} µm` for the cesium configuration,
/// and whether it stays clear of direct dipole–dipole interaction (`M < 200`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryCheck {
    pub distance_um: f64,
    pub feasible: bool,
}

pub fn ensemble_geometry_check(m_atoms: usize) -> Result<GeometryCheck> {
    if m_atoms < 1 {
        return Err(invalid("m_atoms", "must be at least 1"));
    }
    Ok(GeometryCheck {
        distance_um: 4.1 / (m_atoms as f64).sqrt(),
        feasible: m_atoms < 200,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_points() {
        let g = ensemble_geometry_check(100).unwrap();
        assert!((g.distance_um - 0.41).abs() < 1e-12);
        assert!(g.feasible);
        assert!(!ensemble_geometry_check(200).unwrap().feasible);
        let g = ensemble_geometry_check(1).unwrap();
        assert!((g.distance_um - 4.1).abs() < 1e-12 && g.feasible);
        assert!(ensemble_geometry_check(0).is_err());
    }
}
