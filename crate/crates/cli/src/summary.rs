//! Pass/fail lines printed by `reproduce`.

use std::fmt;

use serde::Serialize;
use serde_json::Value;

use zenoclone_core::dynamics::IntegratorConfig;
use zenoclone_core::experiments::Fig4Knob;
use zenoclone_core::experiments::{
    defaults as d, evolve_mode, fig4_params, perturbed_clone_fidelity, HeadlineReport, Mode,
    ResultTable,
};
use zenoclone_core::observables::w_state_fidelity;
use zenoclone_core::zeno::protocol_schedule;
use zenoclone_core::{InitialKind, SystemParams};

use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetLine {
    pub name: String,
    pub computed: f64,
    pub expected: String,
    pub pass: bool,
    /// Reported for comparison only; never counted as a failure.
    pub informational: bool,
}

impl TargetLine {
    fn check(
        name: impl Into<String>,
        computed: f64,
        expected: impl Into<String>,
        pass: bool,
    ) -> Self {
        Self {
            name: name.into(),
            computed,
            expected: expected.into(),
            pass,
            informational: false,
        }
    }

    fn info(
        name: impl Into<String>,
        computed: f64,
        expected: impl Into<String>,
        pass: bool,
    ) -> Self {
        Self {
            informational: true,
            ..Self::check(name, computed, expected, pass)
        }
    }
}

impl fmt::Display for TargetLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match (self.informational, self.pass) {
            (false, true) => "PASS",
            (false, false) => "FAIL",
            (true, true) => "info",
            (true, false) => "info*",
        };
        write!(
            f,
            "[{tag}] {:<52} computed {:<12.6} expected {}",
            self.name, self.computed, self.expected
        )
    }
}

fn w_closed_at_t0(p: &SystemParams) -> CliResult<f64> {
    let t0 = protocol_schedule(p, 0)?.t_n;
    let s = evolve_mode(
        p,
        Mode::FullClosed,
        InitialKind::WSeed,
        &[t0],
        &IntegratorConfig::expm(),
    )?
    .remove(0);
    Ok(w_state_fidelity(&s))
}

fn rows_where<'a>(
    table: &'a ResultTable,
    key: &str,
    text: &str,
) -> impl Iterator<Item = &'a zenoclone_core::experiments::ResultRow> {
    let key = key.to_string();
    let text = text.to_string();
    table.rows.iter().filter(move |r| {
        matches!(r.axis(&key), Some(zenoclone_core::experiments::Cell::Text(s)) if *s == text)
    })
}

fn meta_f64(v: &Value, key: &str) -> f64 {
    v.get(key).and_then(Value::as_f64).unwrap_or(f64::NAN)
}

/// Slope of `ln y` against `ln x` by least squares.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

pub fn for_table(id: &str, table: &ResultTable) -> CliResult<Vec<TargetLine>> {
    Ok(match id {
        "fig2a" => fig2a(table)?,
        "fig2b" => fig2b(table),
        "fig3" => fig3(table),
        _ => fig4(table)?,
    })
}

fn fig2a(table: &ResultTable) -> CliResult<Vec<TargetLine>> {
    let base = SystemParams::dimensionless(d::N_CAVITIES, d::M_ATOMS);
    let gp = base.g_prime();
    let strong = w_closed_at_t0(&base.clone().with_omega(0.1 * gp).with_v(0.5 * gp))?;
    let mut out = vec![TargetLine::check(
        "F(Ω = 0.1g′, v = 0.5g′) ≥ 0.90",
        strong,
        "≥ 0.90",
        strong >= 0.90,
    )];
    let weakest = table
        .rows
        .iter()
        .filter(|r| r.axis_num("omega_over_gprime") == Some(d::FIG2A_OMEGA_RANGE.0))
        .filter_map(|r| r.observable("fidelity"))
        .fold(f64::INFINITY, f64::min);
    out.push(TargetLine::check(
        "min over v of F(Ω = 0.005g′) ≥ 0.999",
        weakest,
        "≥ 0.999",
        weakest >= 0.999,
    ));
    if let Some(Value::Array(trend)) = table.metadata.get("trend") {
        for t in trend {
            let v = meta_f64(t, "v_over_gprime");
            let env = t
                .get("envelope_decreasing")
                .and_then(Value::as_bool)
                .unwrap_or(false);
            let strict = t
                .get("maxima_decreasing")
                .and_then(Value::as_bool)
                .unwrap_or(false);
            out.push(TargetLine::check(
                format!("v = {v}g′: decreasing envelope"),
                f64::from(u8::from(env)),
                "1",
                env,
            ));
            out.push(TargetLine::info(
                format!("v = {v}g′: every local maximum lower"),
                f64::from(u8::from(strict)),
                "1",
                strict,
            ));
        }
    }
    Ok(out)
}

fn fig2b(table: &ResultTable) -> Vec<TargetLine> {
    let curve = |name: &str| -> Vec<f64> {
        rows_where(table, "rate_name", name)
            .filter_map(|r| r.observable("fidelity"))
            .collect()
    };
    let kappa = curve("kappa");
    let (f0, fk) = (kappa[0], kappa[kappa.len() - 1]);
    let mut out = vec![TargetLine::check(
        "F(κ = 0.01g′) ≥ F(0) − 0.01",
        fk,
        format!("≥ {:.6}", f0 - 0.01),
        fk >= f0 - 0.01,
    )];
    for name in ["kappa", "beta", "gamma"] {
        let ys = curve(name);
        let mono = ys.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        out.push(TargetLine::check(
            format!("{name} curve non-increasing"),
            ys[ys.len() - 1],
            "monotone",
            mono,
        ));
    }
    let slopes = table.metadata.get("slopes").cloned().unwrap_or(Value::Null);
    let g = meta_f64(&slopes, "gamma");
    let steepest = table
        .metadata
        .get("steepest")
        .and_then(Value::as_str)
        .unwrap_or("");
    out.push(TargetLine::info(
        format!("γ′ steepest (measured steepest: {steepest})"),
        g,
        "gamma",
        steepest == "gamma",
    ));
    out
}

fn fig3(table: &ResultTable) -> Vec<TargetLine> {
    let traces = match table.metadata.get("traces") {
        Some(Value::Array(t)) => t.clone(),
        _ => Vec::new(),
    };
    let panel = |p: &str| -> Vec<&Value> { traces.iter().filter(|t| t["panel"] == p).collect() };
    let mut out = Vec::new();
    let g = panel("g");
    let mut prev = f64::INFINITY;
    let mut decreasing = true;
    for t in &g {
        let n = meta_f64(t, "n_cavities");
        let f = meta_f64(t, "full_corrected_at_t0");
        let target = 0.5 + 0.5 / n.sqrt();
        out.push(TargetLine::check(
            format!("qubit-2 optimum at N = {n} tracks 1/2 + 1/(2√N)"),
            f,
            format!("{target:.6} ± 0.005"),
            (f - target).abs() <= 5e-3,
        ));
        decreasing &= f < prev;
        prev = f;
    }
    out.push(TargetLine::check(
        "qubit-2 optimum decreases with N",
        prev,
        "decreasing",
        decreasing,
    ));
    let e = panel("e");
    let ms: Vec<f64> = e.iter().map(|t| meta_f64(t, "m_atoms")).collect();
    let topt: Vec<f64> = e.iter().map(|t| meta_f64(t, "t_first_optimum")).collect();
    let grows = topt.windows(2).all(|w| w[1] > w[0]);
    out.push(TargetLine::check(
        "time of first optimum grows with M",
        topt[topt.len() - 1],
        "increasing",
        grows,
    ));
    let t0s: Vec<f64> = e.iter().map(|t| meta_f64(t, "t0")).collect();
    let tail = ms.len().saturating_sub(2);
    let slope_tail = loglog_slope(&ms[tail..], &topt[tail..]);
    out.push(TargetLine::info(
        "log t_opt vs log M slope, two largest M",
        slope_tail,
        "→ 0.5 once Mg² ≫ Nv²",
        (slope_tail - 0.5).abs() <= 0.1,
    ));
    out.push(TargetLine::info(
        "log t₀ vs log M slope, all M",
        loglog_slope(&ms, &t0s),
        "→ 0.5",
        true,
    ));
    let b = panel("b");
    let means: Vec<f64> = b.iter().map(|t| meta_f64(t, "raw_mean")).collect();
    let ranges: Vec<f64> = b.iter().map(|t| meta_f64(t, "raw_range")).collect();
    let higher = means.windows(2).all(|w| w[1] < w[0]);
    let flatter = ranges.windows(2).all(|w| w[1] > w[0]);
    out.push(TargetLine::check(
        "smaller θ: higher qubit-1 trace",
        means[0],
        "mean decreasing in θ",
        higher,
    ));
    out.push(TargetLine::check(
        "smaller θ: flatter qubit-1 trace",
        ranges[0],
        "range increasing in θ",
        flatter,
    ));
    out
}

/// Worst corrected qubit-2 drop over the four (±δt, ±δθ) corners.
pub fn time_theta_worst_drop(rel: f64) -> CliResult<(f64, f64)> {
    let p = fig4_params();
    let (_, base) = perturbed_clone_fidelity(&p, &[], 2)?;
    let mut worst = 0.0f64;
    for st in [-1.0, 1.0] {
        for sth in [-1.0, 1.0] {
            let (_, f) = perturbed_clone_fidelity(
                &p,
                &[(Fig4Knob::Time, st * rel), (Fig4Knob::Theta, sth * rel)],
                2,
            )?;
            worst = worst.max(base - f);
        }
    }
    Ok((base, worst))
}

fn fig4(table: &ResultTable) -> CliResult<Vec<TargetLine>> {
    let base = table
        .metadata
        .get("baseline_corrected")
        .and_then(Value::as_f64)
        .unwrap_or(f64::NAN);
    let mut out = vec![TargetLine::check(
        "zero-deviation corrected fidelity",
        base,
        "0.78868 ± 0.005",
        (base - 0.78868).abs() <= 5e-3,
    )];
    let p = fig4_params();
    let (_, corner) =
        perturbed_clone_fidelity(&p, &[(Fig4Knob::Time, 0.1), (Fig4Knob::Theta, 0.1)], 2)?;
    out.push(TargetLine::check(
        "(δt/t, δθ/θ) = (0.1, 0.1) ≥ 0.788 − 0.01",
        corner,
        "≥ 0.778",
        corner >= d::TARGET_CLONE_FIDELITY - 0.01,
    ));
    let (_, worst) = time_theta_worst_drop(0.1)?;
    out.push(TargetLine::check(
        "worst ±10% (t, θ) corner drop ≤ 0.01",
        worst,
        "≤ 0.01",
        worst <= 0.01,
    ));
    let (_, g1) = perturbed_clone_fidelity(&p, &[(Fig4Knob::G(1), 0.1)], 2)?;
    out.push(TargetLine::check(
        "δg₁/g₁ = 0.1: ΔF ≤ 0.02",
        base - g1,
        "≤ 0.02",
        base - g1 <= 0.02,
    ));
    Ok(out)
}

pub fn headline(report: &HeadlineReport) -> Vec<TargetLine> {
    let mut out: Vec<TargetLine> = report
        .paper_targets
        .iter()
        .map(|t| {
            let floor = t.floor.map(|f| format!(", ≥ {f}")).unwrap_or_default();
            TargetLine::check(
                &t.name,
                t.computed,
                format!("{} ± {}{floor}", t.target, t.tolerance),
                t.pass,
            )
        })
        .collect();
    let b = &report.channel_breakdown;
    for (name, v) in [
        ("closed", b.closed),
        ("κ only", b.kappa_only),
        ("γ only", b.gamma_only),
        ("β only", b.beta_only),
    ] {
        out.push(TargetLine::info(
            format!("W fidelity at t₀, {name}"),
            v,
            "breakdown",
            true,
        ));
    }
    out.push(TargetLine::info(
        "strong drive with dissipation",
        report.strong_drive_fidelity_open,
        "ambiguous in source",
        true,
    ));
    out
}
