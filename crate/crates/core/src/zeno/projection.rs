use crate::error::{Error, Result};
use crate::linalg::{c, ensure_hermitian, hermitian_eigen, CMatrix};

/// One eigenspace of the measurement Hamiltonian.
#[derive(Debug, Clone)]
pub struct ZenoSector {
    pub eigenvalue: f64,
    /// Orthonormal basis of the sector as columns.
    pub basis: CMatrix,
}

impl ZenoSector {
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct ZenoProjection {
    pub hamiltonian: CMatrix,
    pub sectors: Vec<ZenoSector>,
}

impl ZenoProjection {
    /// Sector whose eigenvalue is closest to `lambda`.
    pub fn sector_near(&self, lambda: f64) -> &ZenoSector {
        self.sectors
            .iter()
            .min_by(|a, b| {
                (a.eigenvalue - lambda)
                    .abs()
                    .total_cmp(&(b.eigenvalue - lambda).abs())
            })
            .expect("at least one sector")
    }
}

/// `Σ_n (λ_n P_n + P_n H_sys P_n)` over the eigenprojections of `h_measure`.
///
/// Eigenvalues closer than `degeneracy_tol` (default `1e-9 ×` spectral radius)
/// share a projector. A gap in `(tol, 10·tol]` is rejected as ambiguous.
pub fn zeno_projected_hamiltonian(
    h_measure: &CMatrix,
    h_system: &CMatrix,
    degeneracy_tol: Option<f64>,
) -> Result<ZenoProjection> {
    if h_measure.shape() != h_system.shape() {
        return Err(Error::DimensionMismatch {
            expected: h_measure.nrows(),
            got: h_system.nrows(),
        });
    }
    ensure_hermitian(h_measure, 1e-12 * (1.0 + h_measure.norm()))?;
    ensure_hermitian(h_system, 1e-12 * (1.0 + h_system.norm()))?;

    let dim = h_measure.nrows();
    let (values, vectors) = hermitian_eigen(h_measure);
    let radius = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = degeneracy_tol.unwrap_or(1e-9 * radius.max(f64::MIN_POSITIVE));

    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..dim {
        let gap = values[k] - values[k - 1];
        if gap <= tol {
            groups.last_mut().unwrap().push(k);
        } else if gap <= 10.0 * tol {
            return Err(Error::AmbiguousDegeneracy {
                gap,
                lower: values[k - 1],
                upper: values[k],
                tol,
            });
        } else {
            groups.push(vec![k]);
        }
    }

    let mut hamiltonian = CMatrix::zeros(dim, dim);
    let mut sectors = Vec::with_capacity(groups.len());
    for group in groups {
        let eigenvalue = group.iter().map(|&k| values[k]).sum::<f64>() / group.len() as f64;
        let mut basis = CMatrix::zeros(dim, group.len());
        for (col, &k) in group.iter().enumerate() {
            basis.set_column(col, &vectors.column(k));
        }
        let p = &basis * basis.adjoint();
        hamiltonian += &p * c(eigenvalue) + &p * h_system * &p;
        sectors.push(ZenoSector { eigenvalue, basis });
    }
    Ok(ZenoProjection {
        hamiltonian,
        sectors,
    })
}
