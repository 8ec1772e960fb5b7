//! Subcommand bodies; each returns the files it wrote.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use zenoclone_core::experiments::{
    self, defaults, evolve_mode, run_sweep, Cell, Layout, Observable, ResultRow, ResultTable,
    RowMeta, SweepSpec,
};
use zenoclone_core::observables::SubspaceState;
use zenoclone_core::{BasisLabel, InitialKind};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{csv_document, json_document, plot_script, write_atomic};
use crate::summary::{self, TargetLine};
use crate::validate::{self, Fault, Report};

pub const REPRODUCE_IDS: [&str; 5] = ["fig2a", "fig2b", "fig3", "fig4", "headline"];

fn out_dir(flag: Option<&Path>, cfg: Option<&RunConfig>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.and_then(|c| c.out_dir.as_ref().map(PathBuf::from)))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_table<C: Serialize>(
    dir: &Path,
    stem: &str,
    format: Format,
    config: &C,
    table: &ResultTable,
) -> CliResult<PathBuf> {
    let (name, content) = match format {
        Format::Csv => (format!("{stem}.csv"), csv_document(config, &table.to_csv())),
        Format::Json => (
            format!("{stem}.json"),
            json_document(
                config,
                table.columns(),
                table.rows_json(),
                Value::Object(table.metadata.clone()),
            ),
        ),
    };
    let path = dir.join(name);
    write_atomic(&path, &content)?;
    Ok(path)
}

/// Time series of one evolution.
pub fn simulate_table(cfg: &RunConfig) -> CliResult<ResultTable> {
    let p = cfg.to_params()?;
    let mode = cfg.mode_resolved();
    let kind = cfg.initial_resolved();
    let times = cfg.times(&p)?;
    let states = evolve_mode(&p, mode, kind, &times, &cfg.integrator())?;
    let clone_obs: Vec<Observable> = match kind {
        InitialKind::WSeed => Vec::new(),
        InitialKind::CloneInput => (1..=p.n())
            .flat_map(|qubit| {
                [false, true].map(|frame_corrected| Observable::CloneFidelity {
                    qubit,
                    frame_corrected,
                })
            })
            .collect(),
    };
    let meta = match zenoclone_core::zeno::protocol_schedule(&p, 0) {
        Ok(s) => RowMeta {
            mu: s.mu,
            t0: s.t_n,
            g_prime: p.g_prime(),
        },
        Err(_) => RowMeta {
            mu: f64::NAN,
            t0: f64::NAN,
            g_prime: p.g_prime(),
        },
    };
    let mut table = ResultTable::new(
        cfg.scenario_name(),
        Layout {
            time: true,
            meta: false,
        },
    );
    for (&t, s) in times.iter().zip(&states) {
        let mut obs = vec![
            (
                "fidelity_w".to_string(),
                Observable::WFidelity.evaluate(&p, s)?,
            ),
            (
                "pop_ground".to_string(),
                s.probability(BasisLabel::GlobalGround.index()),
            ),
            (
                "pop_fiber".to_string(),
                s.probability(BasisLabel::FiberPhoton.index()),
            ),
        ];
        for o in &clone_obs {
            obs.push((o.name(), o.evaluate(&p, s)?));
        }
        let row = ResultRow {
            scenario: cfg.scenario_name().to_string(),
            axes: Vec::new(),
            t,
            g_t: p.g * t,
            mode,
            observables: obs,
            meta,
        };
        row.check_range()?;
        table.rows.push(row);
    }
    table
        .metadata
        .insert("params".into(), serde_json::to_value(&p).expect("params"));
    table
        .metadata
        .insert("protocol".into(), serde_json::to_value(meta).expect("meta"));
    Ok(table)
}

fn with_format(cfg: &RunConfig, format: Option<Format>) -> CliResult<RunConfig> {
    let mut c = cfg.clone();
    if format.is_some() {
        c.format = format;
    }
    c.resolved()
}

pub fn simulate(cfg: &RunConfig, out: Option<&Path>, format: Option<Format>) -> CliResult<PathBuf> {
    let dir = out_dir(out, Some(cfg));
    let resolved = with_format(cfg, format)?;
    let table = simulate_table(&resolved)?;
    write_table(
        &dir,
        resolved.scenario_name(),
        resolved.format.unwrap_or_default(),
        &resolved,
        &table,
    )
}

pub fn sweep_spec(cfg: &RunConfig) -> CliResult<SweepSpec> {
    let (axes, observables, time) = cfg.sweep_parts()?;
    Ok(SweepSpec {
        scenario: cfg.scenario_name().to_string(),
        base: cfg.to_params()?,
        axes,
        mode: cfg.mode_resolved(),
        observables,
        time,
        integrator: Some(cfg.integrator()),
    })
}

pub fn sweep(cfg: &RunConfig, out: Option<&Path>, format: Option<Format>) -> CliResult<PathBuf> {
    let dir = out_dir(out, Some(cfg));
    let resolved = with_format(cfg, format)?;
    let spec = sweep_spec(&resolved)?;
    let table = run_sweep(&spec)?;
    write_table(
        &dir,
        resolved.scenario_name(),
        resolved.format.unwrap_or_default(),
        &resolved,
        &table,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproduceOutcome {
    pub files: Vec<PathBuf>,
    pub targets: Vec<TargetLine>,
}

fn plot_for(id: &str) -> Option<(&'static str, &'static str, Option<&'static str>)> {
    match id {
        "fig2a" => Some(("omega_over_gprime", "fidelity", Some("v_over_gprime"))),
        "fig2b" => Some(("rate_over_gprime", "fidelity", Some("rate_name"))),
        "fig3" => Some(("g_t", "full_corrected", Some("theta"))),
        "fig4" => Some(("axis1_rel_dev", "fidelity_corrected", Some("axis2_rel_dev"))),
        _ => None,
    }
}

pub fn reproduce(
    id: &str,
    out: Option<&Path>,
    grid: Option<usize>,
    plot: bool,
) -> CliResult<ReproduceOutcome> {
    if !REPRODUCE_IDS.contains(&id) {
        return Err(CliError::Config(format!(
            "unknown figure id `{id}`; valid ids: {}",
            REPRODUCE_IDS.join(", ")
        )));
    }
    let grid = grid.unwrap_or(defaults::GRID);
    let dir = out_dir(out, None);
    let config = json!({ "reproduce": id, "grid": grid, "defaults": defaults::as_json() });
    let mut files = Vec::new();
    let targets = if id == "headline" {
        let report = experiments::run_headline()?;
        let mut doc = serde_json::to_value(&report).expect("report");
        doc["config"] = config.clone();
        doc[crate::output::TIMESTAMP_KEY] = json!(std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0));
        let path = dir.join("headline.json");
        write_atomic(
            &path,
            &(serde_json::to_string_pretty(&doc).expect("json") + "\n"),
        )?;
        files.push(path);
        let mut table = ResultTable::new(
            "headline",
            Layout {
                time: false,
                meta: false,
            },
        );
        for t in &report.paper_targets {
            table.rows.push(ResultRow {
                scenario: "headline".into(),
                axes: vec![("name".into(), Cell::Text(t.name.clone()))],
                t: report.t0_us,
                g_t: f64::NAN,
                mode: experiments::Mode::FullOpen,
                observables: vec![
                    ("computed".into(), t.computed),
                    ("target".into(), t.target),
                    ("tolerance".into(), t.tolerance),
                    ("pass".into(), if t.pass { 1.0 } else { 0.0 }),
                ],
                meta: RowMeta {
                    mu: f64::NAN,
                    t0: report.t0_us,
                    g_prime: report.params.g_prime(),
                },
            });
        }
        files.push(write_table(&dir, "headline", Format::Csv, &config, &table)?);
        summary::headline(&report)
    } else {
        let table = match id {
            "fig2a" => experiments::run_fig2a(grid)?,
            "fig2b" => experiments::run_fig2b(grid)?,
            "fig3" => experiments::run_fig3(grid)?,
            _ => experiments::run_fig4(grid)?,
        };
        files.push(write_table(&dir, id, Format::Csv, &config, &table)?);
        summary::for_table(id, &table)?
    };
    if plot {
        if let Some((x, y, group)) = plot_for(id) {
            let path = dir.join(format!("{id}.plot.py"));
            write_atomic(&path, &plot_script(&format!("{id}.csv"), x, y, group))?;
            files.push(path);
        }
    }
    Ok(ReproduceOutcome { files, targets })
}

pub fn validate(only: Option<&str>, inject: Option<&str>) -> CliResult<Report> {
    let fault = inject.map(|s| s.parse::<Fault>()).transpose()?;
    Ok(validate::run(only, fault)?)
}

/// Error naming every failed check, or `Ok` when all pass.
pub fn validation_verdict(report: &Report) -> CliResult<()> {
    let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "failed invariants: {}",
            failed.join(", ")
        )))
    }
}
