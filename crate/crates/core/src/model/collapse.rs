use crate::error::Result;
use crate::linalg::{c, CMatrix};

use super::{BasisLabel, SystemParams};

/// A jump operator `L` with its rate `r`, entering the dissipator as
/// `r (L ρ L† − ½{L†L, ρ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOp {
    pub label: String,
    pub rate: f64,
    pub jump: CMatrix,
}

fn jump(dim: usize, to: BasisLabel, from: BasisLabel) -> CMatrix {
    let mut l = CMatrix::zeros(dim, dim);
    l[(to.index(), from.index())] = c(1.0);
    l
}

/// Cavity leakage, spontaneous emission and fiber loss. Zero-rate channels are
/// omitted. With `decay_to_f > 0` a fraction of `γ_x` lands on `FExc(x)`.
pub fn build_collapse_ops(params: &SystemParams) -> Result<Vec<CollapseOp>> {
    params.validate()?;
    let dim = params.dim();
    let mut ops = Vec::new();
    let mut push = |label: String, rate: f64, to, from| {
        if rate > 0.0 {
            ops.push(CollapseOp {
                label,
                rate,
                jump: jump(dim, to, from),
            });
        }
    };
    for x in 1..=params.n() {
        push(
            format!("kappa{x}"),
            params.kappa_at(x),
            BasisLabel::GlobalGround,
            BasisLabel::CavityPhoton(x),
        );
    }
    for x in 1..=params.n() {
        let gamma = params.gamma_at(x);
        push(
            format!("gamma{x}"),
            gamma * (1.0 - params.decay_to_f),
            BasisLabel::GlobalGround,
            BasisLabel::EExc(x),
        );
        push(
            format!("gamma{x}_to_f"),
            gamma * params.decay_to_f,
            BasisLabel::FExc(x),
            BasisLabel::EExc(x),
        );
    }
    push(
        "beta".to_string(),
        params.beta,
        BasisLabel::GlobalGround,
        BasisLabel::FiberPhoton,
    );
    Ok(ops)
}
