use crate::error::Result;
use crate::model::SystemParams;

use super::analytic::amplitudes_abcd;

/// Closed-form fidelity of each clone at the protocol time.
pub fn clone_fidelity_formula(theta: f64, n_cavities: usize) -> f64 {
    let n = n_cavities as f64;
    let (s, c) = (theta / 2.0).sin_cos();
    let (c2, s2) = (c * c, s * s);
    c2 * c2 + s2 * s2 / n + ((n - 1.0) / n + 2.0 / n.sqrt()) * c2 * s2
}

/// Effective-model fidelity of the sender qubit (node 1). With
/// `frame_corrected` the logical phase flip `|1⟩ → −|1⟩` is applied first,
/// i.e. `A → −A` in the coherence term.
pub fn fidelity_qubit1_eff(
    params: &SystemParams,
    t: f64,
    theta: f64,
    frame_corrected: bool,
) -> Result<f64> {
    let z = amplitudes_abcd(params, t)?;
    let n = params.n() as f64;
    let (s, c) = (theta / 2.0).sin_cos();
    let (c2, s2) = (c * c, s * s);
    let a = if frame_corrected { -z.a } else { z.a };
    let env = (n - 1.0) * (z.b.norm_sqr() + z.c.norm_sqr()) + z.d.norm_sqr() + 2.0 * a.re;
    Ok(c2 * c2 + z.a.norm_sqr() * s2 * s2 + c2 * s2 * env)
}

/// Effective-model fidelity of a receiving qubit (node 2, and by symmetry every
/// node ≥ 2).
pub fn fidelity_qubit2_eff(
    params: &SystemParams,
    t: f64,
    theta: f64,
    frame_corrected: bool,
) -> Result<f64> {
    let z = amplitudes_abcd(params, t)?;
    let n = params.n() as f64;
    let (s, c) = (theta / 2.0).sin_cos();
    let (c2, s2) = (c * c, s * s);
    let b = if frame_corrected { -z.b } else { z.b };
    let env = (n - 2.0) * (z.b.norm_sqr() + z.c.norm_sqr())
        + z.a.norm_sqr()
        + z.c.norm_sqr()
        + z.d.norm_sqr()
        + 2.0 * b.re;
    Ok(c2 * c2 + z.b.norm_sqr() * s2 * s2 + c2 * s2 * env)
}
