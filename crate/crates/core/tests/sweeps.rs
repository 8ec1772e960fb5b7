use approx::assert_abs_diff_eq;
use zenoclone_core::experiments::{
    default_integrator, evolve_mode, run_fig2a, run_sweep, AxisScale, Mode, Observable, ParamPath,
    SweepAxis, SweepSpec, TimePolicy,
};
use zenoclone_core::observables::w_state_fidelity;
use zenoclone_core::{InitialKind, SystemParams};

fn grid_spec(mode: Mode) -> SweepSpec {
    SweepSpec {
        scenario: "grid".into(),
        base: SystemParams::dimensionless(3, 100),
        axes: vec![
            SweepAxis::new(
                "omega_over_gprime",
                ParamPath::Omega,
                vec![0.02, 0.05, 0.08],
                AxisScale::GPrime,
            ),
            SweepAxis::new(
                "v_over_gprime",
                ParamPath::V,
                vec![0.5, 1.0, 2.0],
                AxisScale::GPrime,
            ),
        ],
        mode,
        observables: vec![Observable::WFidelity],
        time: TimePolicy::protocol(),
        integrator: None,
    }
}

#[test]
fn grid_rows_are_row_major() {
    let table = run_sweep(&grid_spec(Mode::FullClosed)).unwrap();
    assert_eq!(table.rows.len(), 9);
    let got: Vec<(f64, f64)> = table
        .rows
        .iter()
        .map(|r| {
            (
                r.axis_num("omega_over_gprime").unwrap(),
                r.axis_num("v_over_gprime").unwrap(),
            )
        })
        .collect();
    let mut want = Vec::new();
    for om in [0.02, 0.05, 0.08] {
        for v in [0.5, 1.0, 2.0] {
            want.push((om, v));
        }
    }
    assert_eq!(got, want);
}

#[test]
fn sweeps_are_deterministic() {
    let spec = grid_spec(Mode::FullClosed);
    assert_eq!(
        run_sweep(&spec).unwrap().to_csv(),
        run_sweep(&spec).unwrap().to_csv()
    );
    let a = run_fig2a(7).unwrap().to_csv();
    assert_eq!(a, run_fig2a(7).unwrap().to_csv());
}

#[test]
fn weak_drive_grid_point_is_near_ideal() {
    let table = run_sweep(&grid_spec(Mode::FullClosed)).unwrap();
    let f = table.rows[0].observable("fidelity_w").unwrap();
    assert!(f > 0.99, "{f}");
}

#[test]
fn open_without_rates_matches_closed() {
    for v in [0.5, 2.0] {
        let p = SystemParams::dimensionless(3, 100)
            .with_v(v)
            .with_omega(0.04);
        let times: Vec<f64> = (0..6).map(|k| 12.0 * k as f64).collect();
        let closed = evolve_mode(
            &p,
            Mode::FullClosed,
            InitialKind::WSeed,
            &times,
            &default_integrator(Mode::FullClosed),
        )
        .unwrap();
        let open = evolve_mode(
            &p,
            Mode::FullOpen,
            InitialKind::WSeed,
            &times,
            &default_integrator(Mode::FullOpen),
        )
        .unwrap();
        for (a, b) in closed.iter().zip(&open) {
            assert_abs_diff_eq!(w_state_fidelity(a), w_state_fidelity(b), epsilon = 1e-8);
        }
    }
}

#[test]
fn effective_tracks_full_at_weak_drive() {
    let p = SystemParams::dimensionless(4, 100).with_omega(0.01);
    let t0 = zenoclone_core::zeno::protocol_schedule(&p, 0).unwrap().t_n;
    let cfg = default_integrator(Mode::FullClosed);
    let eff = evolve_mode(&p, Mode::Effective, InitialKind::WSeed, &[t0], &cfg).unwrap();
    let full = evolve_mode(&p, Mode::FullClosed, InitialKind::WSeed, &[t0], &cfg).unwrap();
    assert_abs_diff_eq!(w_state_fidelity(&eff[0]), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(w_state_fidelity(&full[0]), 1.0, epsilon = 2e-3);
}

#[test]
fn invalid_sweeps_are_rejected() {
    let mut spec = grid_spec(Mode::Effective);
    spec.axes[0].values = vec![0.05, 0.02];
    assert!(run_sweep(&spec).is_err());
    let mut spec = grid_spec(Mode::Effective);
    spec.observables.push(Observable::CloneFidelity {
        qubit: 2,
        frame_corrected: true,
    });
    assert!(run_sweep(&spec).is_err());
    let mut spec = grid_spec(Mode::Effective);
    spec.axes.clear();
    assert!(run_sweep(&spec).is_err());
}
