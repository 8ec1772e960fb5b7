//! Built-in scenario parameters, echoed into every emitted table.

use std::f64::consts::PI;

pub const N_CAVITIES: usize = 3;
pub const M_ATOMS: usize = 100;
/// Points per sweep axis.
pub const GRID: usize = 31;

pub const FIG2A_OMEGA_RANGE: (f64, f64) = (0.005, 0.15);
pub const FIG2A_V: [f64; 3] = [0.5, 1.0, 2.0];

pub const FIG2B_OMEGA: f64 = 0.05;
pub const FIG2B_V: f64 = 0.5;
pub const FIG2B_RATE_MAX: f64 = 0.01;

/// Per-atom coupling held fixed while M varies.
pub const FIG3_G: f64 = 0.1;
pub const FIG3_V: f64 = 0.5;
pub const FIG3_OMEGA: f64 = 0.05;
pub const FIG3_THETAS: [f64; 4] = [PI / 8.0, PI / 4.0, 3.0 * PI / 8.0, PI / 2.0];
pub const FIG3_M: [usize; 4] = [25, 100, 400, 1600];
pub const FIG3_N: [usize; 4] = [3, 4, 5, 6];
/// Time samples per trace are `FIG3_SAMPLES_PER_GRID · grid + 1`.
pub const FIG3_SAMPLES_PER_GRID: usize = 4;
/// Trace window as a multiple of the longest protocol time in a panel.
pub const FIG3_WINDOW: f64 = 1.5;

pub const FIG4_OMEGA: f64 = 0.05;
/// `0.5·g` with `g = g′/√100`.
pub const FIG4_V: f64 = 0.05;
pub const FIG4_SPAN: f64 = 0.15;

pub const G_PRIME_MHZ: f64 = 185.0;
pub const KAPPA_MHZ: f64 = 53.0;
pub const GAMMA_MHZ: f64 = 3.0;
pub const BETA_MHZ: f64 = 0.15;
pub const HEADLINE_V: f64 = 0.5;
pub const HEADLINE_T0_US: f64 = 0.147;
pub const STRONG_DRIVE: f64 = 0.1;
pub const OMEGA_SENSITIVITY: [f64; 5] = [0.8, 0.9, 1.0, 1.1, 1.2];

pub const TARGET_W_FIDELITY_OPEN: f64 = 0.9766;
pub const TOL_W_FIDELITY_OPEN: f64 = 0.02;
pub const FLOOR_W_FIDELITY_OPEN: f64 = 0.97;
pub const TARGET_STRONG_DRIVE: f64 = 0.8737;
pub const TOL_STRONG_DRIVE: f64 = 0.02;
pub const TARGET_OMEGA_OVER_GPRIME: f64 = 0.016;
pub const TOL_OMEGA_OVER_GPRIME: f64 = 0.001;
pub const TARGET_CLONE_FIDELITY: f64 = 0.788;

pub fn as_json() -> serde_json::Value {
    serde_json::json!({
        "n_cavities": N_CAVITIES,
        "m_atoms": M_ATOMS,
        "grid": GRID,
        "fig2a": { "omega_over_gprime": FIG2A_OMEGA_RANGE, "v_over_gprime": FIG2A_V, "model": "full-closed" },
        "fig2b": { "omega_over_gprime": FIG2B_OMEGA, "v_over_gprime": FIG2B_V, "rate_max_over_gprime": FIG2B_RATE_MAX, "model": "full-open" },
        "fig3": {
            "g": FIG3_G, "v": FIG3_V, "omega": FIG3_OMEGA,
            "theta": FIG3_THETAS, "m_atoms": FIG3_M, "n_cavities": FIG3_N,
            "samples_per_grid": FIG3_SAMPLES_PER_GRID, "window_over_t0": FIG3_WINDOW,
        },
        "fig4": { "omega_over_gprime": FIG4_OMEGA, "v_over_gprime": FIG4_V, "theta": PI / 2.0, "span": FIG4_SPAN, "model": "full-closed" },
        "headline": {
            "g_prime_mhz": G_PRIME_MHZ, "kappa_mhz": KAPPA_MHZ, "gamma_mhz": GAMMA_MHZ, "beta_mhz": BETA_MHZ,
            "v_over_gprime": HEADLINE_V, "t0_target_us": HEADLINE_T0_US, "strong_drive_over_gprime": STRONG_DRIVE,
        },
    })
}
