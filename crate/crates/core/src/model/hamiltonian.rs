use crate::error::Result;
use crate::linalg::{c, CMatrix};

use super::{BasisLabel, SystemParams};

fn couple(h: &mut CMatrix, a: BasisLabel, b: BasisLabel, value: f64) {
    h[(a.index(), b.index())] += c(value);
    h[(b.index(), a.index())] += c(value);
}

/// Classical drive `Σ_x Ω_x |e⟩⟨f| + h.c.` restricted to the subspace.
pub fn build_h_laser(params: &SystemParams) -> Result<CMatrix> {
    params.validate()?;
    let mut h = CMatrix::zeros(params.dim(), params.dim());
    for x in 1..=params.n() {
        couple(
            &mut h,
            BasisLabel::EExc(x),
            BasisLabel::FExc(x),
            params.omega_at(x),
        );
    }
    Ok(h)
}

/// Atom–cavity (`√M·g_x`) and cavity–fiber (`v_x`) couplings.
pub fn build_h_i(params: &SystemParams) -> Result<CMatrix> {
    params.validate()?;
    let mut h = CMatrix::zeros(params.dim(), params.dim());
    for x in 1..=params.n() {
        couple(
            &mut h,
            BasisLabel::EExc(x),
            BasisLabel::CavityPhoton(x),
            params.g_prime_at(x),
        );
        couple(
            &mut h,
            BasisLabel::FiberPhoton,
            BasisLabel::CavityPhoton(x),
            params.v_at(x),
        );
    }
    Ok(h)
}

pub fn build_h_total(params: &SystemParams) -> Result<CMatrix> {
    Ok(build_h_laser(params)? + build_h_i(params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_deviation, CVector};

    fn paper() -> SystemParams {
        let mut p = SystemParams::dimensionless(3, 100);
        p.g = 1.0;
        p.v = 5.0;
        p.omega = 0.5;
        p.omega1 = Some(1.366);
        p
    }

    #[test]
    fn collective_enhancement_entry() {
        let h = build_h_total(&paper()).unwrap();
        let e1 = BasisLabel::EExc(1).index();
        let c1 = BasisLabel::CavityPhoton(1).index();
        assert!((h[(e1, c1)].re - 10.0).abs() < 1e-14);
        assert!(
            (h[(BasisLabel::EExc(1).index(), BasisLabel::FExc(1).index())].re - 1.366).abs()
                < 1e-15
        );
        let fib = BasisLabel::FiberPhoton.index();
        assert_eq!(h[(fib, BasisLabel::CavityPhoton(2).index())].re, 5.0);
    }

    #[test]
    fn ground_row_is_zero() {
        let h = build_h_total(&paper()).unwrap();
        assert!(h.row(0).iter().all(|z| z.norm() == 0.0));
        assert!(h.column(0).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn split_sums_to_total() {
        let p = paper();
        let total = build_h_total(&p).unwrap();
        let sum = build_h_laser(&p).unwrap() + build_h_i(&p).unwrap();
        assert_eq!(total, sum);
        assert_eq!(hermiticity_deviation(&total), 0.0);
    }

    #[test]
    fn laser_only_touches_f_e_pairs() {
        let p = paper();
        let h = build_h_laser(&p).unwrap();
        for i in 0..p.dim() {
            for j in 0..p.dim() {
                if h[(i, j)].norm() > 0.0 {
                    let (a, b) = (
                        BasisLabel::from_index(3, i).unwrap(),
                        BasisLabel::from_index(3, j).unwrap(),
                    );
                    let ok = matches!((a, b), (BasisLabel::EExc(x), BasisLabel::FExc(y)) | (BasisLabel::FExc(x), BasisLabel::EExc(y)) if x == y);
                    assert!(ok, "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn measurement_part_annihilates_f1() {
        let p = paper();
        let h = build_h_i(&p).unwrap();
        let mut f1 = CVector::zeros(p.dim());
        f1[1] = c(1.0);
        assert_eq!((h * f1).norm(), 0.0);
    }
}
