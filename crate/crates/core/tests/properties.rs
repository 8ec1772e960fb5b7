use proptest::prelude::*;
use zenoclone_core::dynamics::{
    evolve_lindblad, evolve_schrodinger, lindblad_trajectory, IntegratorConfig,
};
use zenoclone_core::linalg::{hermiticity_deviation, norm_inf};
use zenoclone_core::model::{build_collapse_ops, build_h_total, enumerate_basis};
use zenoclone_core::observables::{clone_fidelity, reduce_to_logical_qubit};
use zenoclone_core::zeno::{analytic_state, clone_fidelity_formula, protocol_schedule};
use zenoclone_core::{BasisLabel, InitialKind, SystemParams};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn fine_rk4(h: &zenoclone_core::linalg::CMatrix, p: &SystemParams) -> IntegratorConfig {
    let scale = norm_inf(h).max(p.kappa).max(p.gamma).max(p.beta);
    IntegratorConfig::rk4().with_dt(0.005 / scale)
}

fn params() -> impl Strategy<Value = SystemParams> {
    (
        2usize..=5,
        1usize..=400,
        0.1f64..3.0,
        0.005f64..0.2,
        0.0f64..0.05,
        0.0f64..0.05,
        0.0f64..0.05,
    )
        .prop_map(|(n, m, v, om, k, g, b)| {
            let base = SystemParams::dimensionless(n, m);
            let gp = base.g_prime();
            base.with_v(v * gp)
                .with_omega(om * gp)
                .with_rates(k * gp, g * gp, b * gp)
        })
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn basis_index_round_trips(n in 2usize..=12) {
        let basis = enumerate_basis(n).unwrap();
        prop_assert_eq!(basis.dim(), 3 * n + 2);
        for (i, &label) in basis.labels().iter().enumerate() {
            prop_assert_eq!(label.index(), i);
            prop_assert_eq!(BasisLabel::from_index(n, i), Some(label));
        }
        prop_assert_eq!(BasisLabel::from_index(n, 3 * n + 2), None);
    }

    #[test]
    fn hamiltonian_is_hermitian(p in params()) {
        let h = build_h_total(&p).unwrap();
        prop_assert_eq!(h.nrows(), p.dim());
        prop_assert!(hermiticity_deviation(&h) <= 1e-12);
    }

    #[test]
    fn closed_evolution_preserves_norm(p in params(), t in 0.0f64..200.0) {
        let psi = zenoclone_core::model::initial_state(&p, InitialKind::CloneInput).unwrap();
        let out = evolve_schrodinger(&build_h_total(&p).unwrap(), &psi, t, &IntegratorConfig::expm()).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn analytic_state_is_normalized(p in params(), frac in 0.0f64..3.0) {
        let t0 = protocol_schedule(&p, 0).unwrap().t_n;
        let s = analytic_state(&p, frac * t0).unwrap();
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn clone_formula_is_a_fidelity(theta in 0.0f64..std::f64::consts::PI, n in 2usize..=20) {
        let f = clone_fidelity_formula(theta, n);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&f));
        prop_assert!(f >= 1.0 / n as f64 - 1e-15);
    }

    #[test]
    fn reduced_qubits_are_physical(p in params(), frac in 0.0f64..2.0) {
        let t0 = protocol_schedule(&p, 0).unwrap().t_n;
        let s = analytic_state(&p, frac * t0).unwrap();
        for j in 1..=p.n() {
            let q = reduce_to_logical_qubit(&s, j).unwrap();
            prop_assert!(q.is_physical(1e-10));
            let f = clone_fidelity(&q, p.theta, p.delta, true);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        }
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn lindblad_keeps_trace_and_positivity(p in params(), t in 1.0f64..60.0) {
        let h = build_h_total(&p).unwrap();
        let ops = build_collapse_ops(&p).unwrap();
        let rho0 = zenoclone_core::model::initial_state(&p, InitialKind::WSeed).unwrap().to_density();
        let rho = evolve_lindblad(&h, &ops, &rho0, t, &fine_rk4(&h, &p)).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-8);
        prop_assert!(rho.hermiticity_deviation() <= 1e-10);
        prop_assert!(rho.min_eigenvalue() >= -1e-8);
    }

    #[test]
    fn ground_population_never_decreases(p in params()) {
        let h = build_h_total(&p).unwrap();
        let ops = build_collapse_ops(&p).unwrap();
        let rho0 = zenoclone_core::model::initial_state(&p, InitialKind::WSeed).unwrap().to_density();
        let times: Vec<f64> = (0..=20).map(|k| 2.5 * k as f64).collect();
        let traj = lindblad_trajectory(&h, &ops, &rho0, &times, &fine_rk4(&h, &p)).unwrap();
        let pops: Vec<f64> = traj.iter().map(|r| r.population(BasisLabel::GlobalGround)).collect();
        for w in pops.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-10, "{} -> {}", w[0], w[1]);
        }
    }
}
