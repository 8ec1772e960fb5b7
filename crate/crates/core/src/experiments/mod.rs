//! Sweep engine and the built-in scenarios.

pub mod defaults;
mod scenarios;
mod sweep;
mod table;

pub use scenarios::{
    block_maxima, coupling_deviation_drop, fig2b_params, fig3_params, fig4_params, golden_max,
    headline_params, local_maxima, perturbed_clone_fidelity, run_fig2a, run_fig2b, run_fig3,
    run_fig4, run_headline, solve_omega_for_t0, ChannelBreakdown, Fig4Knob, HeadlineReport,
    RateChannel, SensitivityPoint, TargetCheck, TraceSummary, FIG4_PANELS,
};
pub use sweep::{
    default_integrator, evaluate_point, evolve_mode, ideal_clone_state, linspace, run_sweep,
    AxisScale, Evolved, Mode, Observable, ParamPath, SweepAxis, SweepSpec, TimePolicy,
};
pub use table::{format_f64, Cell, Layout, ResultRow, ResultTable, RowMeta, OBSERVABLE_SLACK};
