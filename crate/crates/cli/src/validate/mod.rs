//! Invariant suite behind `zenoclone validate`.

mod dicke;

use std::f64::consts::PI;
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use zenoclone_core::dynamics::{
    evolve_schrodinger, lindblad_trajectory, IntegratorConfig, SpectralPropagator, HERMITICITY_TOL,
    NORM_TOL, POSITIVITY_TOL, TRACE_TOL,
};
use zenoclone_core::experiments::{
    evolve_mode, fig3_params, headline_params, ideal_clone_state, run_sweep, solve_omega_for_t0,
    AxisScale, Evolved, Mode, Observable, ParamPath, SweepAxis, SweepSpec, TimePolicy,
};
use zenoclone_core::linalg::{c, expm, hermiticity_deviation, C64};
use zenoclone_core::model::{
    build_collapse_ops, build_h_i, build_h_laser, build_h_total, ensemble_geometry_check,
    enumerate_basis, initial_state, NodeField,
};
use zenoclone_core::observables::{clone_fidelity, reduce_to_logical_qubit, w_state_fidelity};
use zenoclone_core::zeno::{
    amplitudes_abcd, analytic_state, clone_fidelity_formula, dark_state, effective_hamiltonian,
    fidelity_qubit2_eff, protocol_schedule, w_state, zeno_projected_hamiltonian,
};
use zenoclone_core::{
    BasisLabel, DensityMatrix, Error, InitialKind, Result, StateVector, SystemParams,
};

pub use dicke::dicke_deviation;

pub const MODULES: [&str; 5] = ["model", "zeno", "dynamics", "observables", "experiments"];

const SEED: u64 = 0x5eed_2e70;
const DRAWS: usize = 24;

/// Deliberate defects used to confirm the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of the fiber component of the dark state.
    DarkSign,
}

impl std::str::FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dark-sign" => Ok(Fault::DarkSign),
            other => Err(Error::Config(format!("unknown fault `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<12} {:<44} measured {:.3e} (tol {:.1e}){}",
            if self.pass { "PASS" } else { "FAIL" },
            self.module,
            self.name,
            self.measured,
            self.tolerance,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!("  {}", self.detail)
            }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Suite {
    only: Option<String>,
    fault: Option<Fault>,
    checks: Vec<Check>,
}

impl Suite {
    /// `measured ≤ tolerance` passes; an `Err` fails with its message.
    fn run(
        &mut self,
        module: &'static str,
        name: &'static str,
        tolerance: f64,
        f: impl FnOnce(&Self) -> Result<f64>,
    ) {
        if self.only.as_deref().is_some_and(|m| m != module) {
            return;
        }
        let (measured, pass, detail) = match f(self) {
            Ok(x) => (x, x <= tolerance, String::new()),
            Err(e) => (f64::NAN, false, e.to_string()),
        };
        self.checks.push(Check {
            module,
            name,
            measured,
            tolerance,
            pass,
            detail,
        });
    }
}

fn rng() -> StdRng {
    StdRng::seed_from_u64(SEED)
}

/// Random parameters; `spread` scatters the per-node values, `rates` adds
/// dissipation.
fn draw(rng: &mut StdRng, n: usize, m: usize, spread: bool, rates: bool) -> SystemParams {
    let mut p = SystemParams::dimensionless(n, m)
        .with_v(rng.random_range(0.2..2.0))
        .with_omega(rng.random_range(0.005..0.2));
    p.g = rng.random_range(0.3..1.5) / (m as f64).sqrt();
    p = p.with_input(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
    if rates {
        p = p.with_rates(
            rng.random_range(0.0..0.05),
            rng.random_range(0.0..0.05),
            rng.random_range(0.0..0.05),
        );
    }
    if spread {
        for field in [NodeField::G, NodeField::V, NodeField::Omega] {
            let base: Vec<f64> = (1..=n)
                .map(|x| match field {
                    NodeField::G => p.g_at(x),
                    NodeField::V => p.v_at(x),
                    _ => p.omega_at(x),
                })
                .collect();
            let scale: Vec<f64> = (0..n).map(|_| rng.random_range(0.8..1.2)).collect();
            let v = p.node_vector_mut(field);
            for (k, slot) in v.iter_mut().enumerate() {
                *slot = base[k] * scale[k];
            }
        }
    }
    p
}

fn max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn try_max(xs: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m = 0.0f64;
    for x in xs {
        m = m.max(x?);
    }
    Ok(m)
}

fn spread(xs: &[f64]) -> f64 {
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

fn model_checks(s: &mut Suite) {
    s.run("model", "basis bijection", 0.0, |_| {
        let mut bad = 0usize;
        for n in 2..=8 {
            let b = enumerate_basis(n)?;
            for (i, &label) in b.labels().iter().enumerate() {
                if label.index() != i
                    || BasisLabel::from_index(n, i) != Some(label)
                    || b.index_of(label) != Some(i)
                {
                    bad += 1;
                }
            }
            bad +=
                usize::from(b.dim() != 3 * n + 2 || BasisLabel::from_index(n, b.dim()).is_some());
        }
        Ok(bad as f64)
    });
    s.run("model", "hamiltonian hermiticity", 1e-15, |_| {
        let mut r = rng();
        try_max((0..DRAWS).map(|k| {
            let p = draw(&mut r, 2 + k % 5, 1 + k * 7, k % 2 == 1, false);
            Ok(hermiticity_deviation(&build_h_total(&p)?))
        }))
    });
    s.run("model", "brute-force dicke equivalence", 1e-12, |_| {
        let mut r = rng();
        let mut worst = 0.0f64;
        for m in 1..=3 {
            for spread in [false, true] {
                let p = draw(&mut r, 3, m, spread, false);
                let (dev, leak) = dicke_deviation(&p, &build_h_total(&p)?)?;
                worst = worst.max(dev).max(leak);
            }
        }
        Ok(worst)
    });
    s.run("model", "collapse channel count", 0.0, |_| {
        let p = SystemParams::dimensionless(3, 100).with_rates(0.01, 0.01, 0.01);
        let all = build_collapse_ops(&p)?.len();
        let kappa = build_collapse_ops(&p.clone().with_rates(0.01, 0.0, 0.0))?.len();
        Ok((all as f64 - 7.0).abs() + (kappa as f64 - 3.0).abs())
    });
    s.run("model", "ensemble geometry condition", 0.0, |_| {
        let ok = ensemble_geometry_check(100)?.feasible && !ensemble_geometry_check(200)?.feasible;
        Ok(if ok { 0.0 } else { 1.0 })
    });
}

fn zeno_checks(s: &mut Suite) {
    s.run("zeno", "dark-state annihilation", 1e-12, |suite| {
        let mut r = rng();
        try_max((0..DRAWS).map(|k| {
            let p = draw(&mut r, 2 + k % 5, 1 + 13 * k, k % 3 == 0, false);
            let hi = build_h_i(&p)?;
            let mut d = dark_state(&p)?.into_state().into_vector();
            if suite.fault == Some(Fault::DarkSign) {
                d[BasisLabel::FiberPhoton.index()] *= c(-1.0);
            }
            Ok((&hi * &d).norm() / hi.norm() + (d.norm() - 1.0).abs())
        }))
    });
    s.run("zeno", "closed form vs propagation", 1e-10, |_| {
        let mut r = rng();
        try_max((0..DRAWS).map(|k| {
            let p = draw(&mut r, 3 + k % 3, 100, k % 2 == 0, false);
            let he = effective_hamiltonian(&p)?;
            let f1 = StateVector::basis(p.dim(), BasisLabel::FExc(1));
            let t = protocol_schedule(&p, 0)?.t_n * r.random_range(0.0..2.0);
            let u = expm(&(&he * C64::new(0.0, -t)));
            let num = &u * f1.as_vector();
            Ok((num - analytic_state(&p, t)?.into_vector()).norm())
        }))
    });
    s.run("zeno", "amplitude completeness", 1e-12, |_| {
        let mut r = rng();
        try_max((0..DRAWS).map(|k| {
            let p = draw(&mut r, 3 + k % 4, 50 + k, false, false);
            let t = r.random_range(0.0..200.0);
            Ok((amplitudes_abcd(&p, t)?.completeness(p.n()) - 1.0).abs())
        }))
    });
    s.run("zeno", "generic zeno projection", 1e-10, |_| {
        let mut r = rng();
        try_max((0..DRAWS / 2).map(|k| {
            let p = draw(&mut r, 3 + k % 3, 100, k % 2 == 1, false);
            let proj = zeno_projected_hamiltonian(&build_h_i(&p)?, &build_h_laser(&p)?, None)?;
            let p0 = proj.sector_near(0.0).projector();
            let restricted = &p0 * &proj.hamiltonian * &p0;
            let he = effective_hamiltonian(&p)?;
            Ok((restricted - &he).norm() / (1.0 + he.norm()))
        }))
    });
    s.run("zeno", "w condition at protocol time", 1e-12, |_| {
        try_max([3, 4, 5].map(|n| {
            let p = SystemParams::dimensionless(n, 100).with_omega(0.03);
            let t0 = protocol_schedule(&p, 0)?.t_n;
            Ok((w_state_fidelity(&analytic_state(&p, t0)?) - 1.0).abs())
        }))
    });
    s.run("zeno", "clone fidelity formula", 1e-12, |_| {
        let mut worst = 0.0f64;
        for n in [3, 4, 5] {
            for k in 0..=4 {
                let theta = k as f64 * PI / 8.0;
                let p = SystemParams::dimensionless(n, 100).with_input(theta, 0.0);
                let t0 = protocol_schedule(&p, 0)?.t_n;
                let f = fidelity_qubit2_eff(&p, t0, theta, true)?;
                worst = worst.max((f - clone_fidelity_formula(theta, n)).abs());
            }
        }
        Ok(worst)
    });
    s.run("zeno", "effective delta independence", 1e-12, |_| {
        delta_spread(Mode::Effective)
    });
}

fn delta_spread(mode: Mode) -> Result<f64> {
    let base = fig3_params(3, 100, 1.1);
    let t0 = protocol_schedule(&base, 0)?.t_n;
    let mut worst = 0.0f64;
    for qubit in [1, 2] {
        let mut vals = Vec::new();
        for k in 0..16 {
            let p = base
                .clone()
                .with_input(base.theta, 2.0 * PI * k as f64 / 16.0);
            let st = evolve_mode(
                &p,
                mode,
                InitialKind::CloneInput,
                &[t0],
                &IntegratorConfig::expm(),
            )?
            .remove(0);
            let q = reduce_to_logical_qubit(&st, qubit)?;
            vals.push(clone_fidelity(&q, p.theta, p.delta, true));
        }
        worst = worst.max(spread(&vals));
    }
    Ok(worst)
}

fn open_trajectory(r: &mut StdRng, k: usize) -> Result<(SystemParams, Vec<DensityMatrix>)> {
    let p = draw(r, 3 + k % 2, 100, k % 2 == 1, true);
    let h = build_h_total(&p)?;
    let ops = build_collapse_ops(&p)?;
    let rho0 = initial_state(&p, InitialKind::CloneInput)?.to_density();
    let t0 = protocol_schedule(&p, 0)?.t_n;
    let times: Vec<f64> = (0..=8).map(|i| t0 * i as f64 / 8.0).collect();
    Ok((
        p,
        lindblad_trajectory(&h, &ops, &rho0, &times, &IntegratorConfig::rk4())?,
    ))
}

fn dynamics_checks(s: &mut Suite) {
    if s.only.as_deref().is_some_and(|m| m != "dynamics") {
        return;
    }
    s.run("dynamics", "unitary norm conservation", NORM_TOL, |_| {
        let mut r = rng();
        try_max((0..DRAWS / 2).map(|k| {
            let p = draw(&mut r, 3, 100, k % 2 == 0, false);
            let h = build_h_total(&p)?;
            let psi0 = initial_state(&p, InitialKind::CloneInput)?;
            let t = r.random_range(1.0..150.0);
            let a = evolve_schrodinger(&h, &psi0, t, &IntegratorConfig::expm())?;
            let b = evolve_schrodinger(&h, &psi0, t, &IntegratorConfig::rk4())?;
            Ok((a.norm() - 1.0).abs().max((b.norm() - 1.0).abs()))
        }))
    });
    let mut r = rng();
    let trajectories: Result<Vec<_>> = (0..4).map(|k| open_trajectory(&mut r, k)).collect();
    let trajectories = trajectories.map_err(|e| e.to_string());
    let over = |f: &dyn Fn(&DensityMatrix) -> f64| -> Result<f64> {
        let t = trajectories
            .as_ref()
            .map_err(|e| Error::Numerical(e.clone()))?;
        Ok(max(t.iter().flat_map(|(_, traj)| traj.iter().map(f))))
    };
    s.run("dynamics", "lindblad trace conservation", TRACE_TOL, |_| {
        over(&|rho| (rho.trace() - 1.0).abs())
    });
    s.run("dynamics", "density positivity", POSITIVITY_TOL, |_| {
        over(&|rho| (-rho.min_eigenvalue()).max(0.0))
    });
    s.run("dynamics", "density hermiticity", HERMITICITY_TOL, |_| {
        over(&|rho| rho.hermiticity_deviation())
    });
    s.run("dynamics", "ground population monotonicity", 1e-12, |_| {
        let t = trajectories
            .as_ref()
            .map_err(|e| Error::Numerical(e.clone()))?;
        Ok(max(t.iter().flat_map(|(_, traj)| {
            traj.windows(2).map(|w| {
                w[0].population(BasisLabel::GlobalGround)
                    - w[1].population(BasisLabel::GlobalGround)
            })
        })))
    });
    s.run("dynamics", "step-halving self-consistency", 1e-7, |_| {
        let p = SystemParams::dimensionless(3, 100).with_rates(0.01, 0.01, 0.01);
        let h = build_h_total(&p)?;
        let ops = build_collapse_ops(&p)?;
        let rho0 = initial_state(&p, InitialKind::WSeed)?.to_density();
        let t0 = [protocol_schedule(&p, 0)?.t_n];
        let cfg = IntegratorConfig::rk4();
        let dt = cfg.step_for(
            ops.iter()
                .map(|o| o.rate)
                .fold(zenoclone_core::linalg::norm_inf(&h), f64::max),
        )?;
        let w = w_state(3);
        let a = lindblad_trajectory(&h, &ops, &rho0, &t0, &cfg)?;
        let b = lindblad_trajectory(&h, &ops, &rho0, &t0, &cfg.with_dt(dt / 2.0))?;
        Ok((w_state_fidelity(&a[0]) - w_state_fidelity(&b[0]))
            .abs()
            .max(
                (zenoclone_core::dynamics::state_fidelity(&a[0], &w)
                    - zenoclone_core::dynamics::state_fidelity(&b[0], &w))
                .abs(),
            ))
    });
    s.run("dynamics", "superoperator vs rk4", 1e-8, |_| {
        let p = SystemParams::dimensionless(3, 100).with_rates(0.02, 0.01, 0.005);
        let h = build_h_total(&p)?;
        let ops = build_collapse_ops(&p)?;
        let rho0 = initial_state(&p, InitialKind::CloneInput)?.to_density();
        let a = lindblad_trajectory(&h, &ops, &rho0, &[25.0], &IntegratorConfig::rk4())?;
        let b = lindblad_trajectory(&h, &ops, &rho0, &[25.0], &IntegratorConfig::expm())?;
        Ok((a[0].as_matrix() - b[0].as_matrix()).norm())
    });
    s.run(
        "dynamics",
        "spectral vs exponential propagation",
        1e-10,
        |_| {
            let mut r = rng();
            try_max((0..DRAWS / 2).map(|k| {
                let p = draw(&mut r, 3 + k % 3, 100, k % 2 == 0, false);
                let h = build_h_total(&p)?;
                let psi0 = initial_state(&p, InitialKind::CloneInput)?;
                let t = r.random_range(0.0..300.0);
                let a = SpectralPropagator::new(&h).evolve(&psi0, t);
                let b = evolve_schrodinger(&h, &psi0, t, &IntegratorConfig::expm())?;
                Ok((a.as_vector() - b.as_vector()).norm())
            }))
        },
    );
    s.run("dynamics", "full-model delta independence", 1e-6, |_| {
        delta_spread(Mode::FullClosed)
    });
}

fn observable_checks(s: &mut Suite) {
    s.run(
        "observables",
        "logical reduction physicality",
        1e-10,
        |_| {
            let mut r = rng();
            let mut worst = 0.0f64;
            for k in 0..4 {
                let (p, traj) = open_trajectory(&mut r, k)?;
                for rho in &traj {
                    for node in 1..=p.n() {
                        let q = reduce_to_logical_qubit(rho, node)?;
                        let m = &q.0;
                        let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
                        let det = a * d - m[(1, 0)].norm_sqr();
                        worst = worst
                            .max((q.trace() - 1.0).max(0.0))
                            .max(-a)
                            .max(-d)
                            .max(-det);
                    }
                }
            }
            Ok(worst)
        },
    );
    s.run("observables", "w state self-fidelity", 1e-14, |_| {
        Ok(max(
            (2..=8).map(|n| (w_state_fidelity(&w_state(n)) - 1.0).abs())
        ))
    });
    s.run("observables", "ideal clone reduction", 1e-12, |_| {
        let mut worst = 0.0f64;
        for n in 3..=6 {
            for k in 0..=4 {
                let theta = k as f64 * PI / 8.0;
                let p = SystemParams::dimensionless(n, 100).with_input(theta, 0.7);
                let ideal = ideal_clone_state(&p);
                for node in 1..=n {
                    let q = reduce_to_logical_qubit(&ideal, node)?;
                    let f = clone_fidelity(&q, theta, 0.7, false);
                    worst = worst.max((f - clone_fidelity_formula(theta, n)).abs());
                }
            }
        }
        Ok(worst)
    });
    s.run(
        "observables",
        "full vs effective clone consistency",
        5e-3,
        |_| {
            let p = fig3_params(3, 100, PI / 2.0);
            let t0 = protocol_schedule(&p, 0)?.t_n;
            let cfg = IntegratorConfig::expm();
            let eff =
                evolve_mode(&p, Mode::Effective, InitialKind::CloneInput, &[t0], &cfg)?.remove(0);
            let full =
                evolve_mode(&p, Mode::FullClosed, InitialKind::CloneInput, &[t0], &cfg)?.remove(0);
            let f = |s: &Evolved, node| -> Result<f64> {
                Ok(clone_fidelity(
                    &reduce_to_logical_qubit(s, node)?,
                    p.theta,
                    p.delta,
                    true,
                ))
            };
            try_max((1..=3).map(|node| Ok((f(&eff, node)? - f(&full, node)?).abs())))
        },
    );
}

fn small_spec() -> SweepSpec {
    SweepSpec {
        scenario: "validate".into(),
        base: SystemParams::dimensionless(3, 100),
        axes: vec![
            SweepAxis::new(
                "v_over_gprime",
                ParamPath::V,
                vec![0.5, 1.0, 2.0],
                AxisScale::GPrime,
            ),
            SweepAxis::new(
                "omega_over_gprime",
                ParamPath::Omega,
                vec![0.01, 0.05, 0.1],
                AxisScale::GPrime,
            ),
        ],
        mode: Mode::FullClosed,
        observables: vec![Observable::WFidelity],
        time: TimePolicy::protocol(),
        integrator: None,
    }
}

fn experiment_checks(s: &mut Suite) {
    s.run("experiments", "sweep determinism", 0.0, |_| {
        let spec = small_spec();
        let a = run_sweep(&spec)?.to_csv();
        let b = run_sweep(&spec)?.to_csv();
        Ok(if a == b { 0.0 } else { 1.0 })
    });
    s.run("experiments", "row order follows grid", 0.0, |_| {
        let spec = small_spec();
        let t = run_sweep(&spec)?;
        let expect = spec.points();
        let bad = t
            .rows
            .iter()
            .zip(&expect)
            .filter(|(row, pt)| {
                row.axes.iter().map(|(_, c)| c.clone()).collect::<Vec<_>>()
                    != pt.iter().map(|&x| x.into()).collect::<Vec<_>>()
            })
            .count();
        Ok((bad + t.rows.len().abs_diff(9)) as f64)
    });
    s.run(
        "experiments",
        "one-point sweep equals direct call",
        0.0,
        |_| {
            let mut spec = small_spec();
            spec.axes = vec![SweepAxis::new(
                "omega",
                ParamPath::Omega,
                vec![0.07],
                AxisScale::Absolute,
            )];
            let row = run_sweep(&spec)?.rows.remove(0);
            let p = spec.base.clone().with_omega(0.07);
            let t0 = protocol_schedule(&p, 0)?.t_n;
            let st = evolve_mode(
                &p,
                Mode::FullClosed,
                InitialKind::WSeed,
                &[t0],
                &IntegratorConfig::expm(),
            )?
            .remove(0);
            let same = row.t == t0 && row.observable("fidelity_w") == Some(w_state_fidelity(&st));
            Ok(if same { 0.0 } else { 1.0 })
        },
    );
    s.run(
        "experiments",
        "quoted protocol time recovered",
        1e-12,
        |_| {
            let probe = headline_params(1.0);
            let r = solve_omega_for_t0(&probe, 0.147)?;
            Ok((protocol_schedule(&headline_params(r), 0)?.t_n - 0.147).abs())
        },
    );
}

/// Run every check, or one module's checks, optionally with a fault injected.
pub fn run(only: Option<&str>, fault: Option<Fault>) -> Result<Report> {
    if let Some(m) = only {
        if !MODULES.contains(&m) {
            return Err(Error::Config(format!(
                "unknown module `{m}`; expected one of {}",
                MODULES.join(", ")
            )));
        }
    }
    let mut s = Suite {
        only: only.map(String::from),
        fault,
        checks: Vec::new(),
    };
    model_checks(&mut s);
    zeno_checks(&mut s);
    dynamics_checks(&mut s);
    observable_checks(&mut s);
    experiment_checks(&mut s);
    Ok(Report { checks: s.checks })
}
