//! `RunConfig`: the JSON document accepted by `simulate` and `sweep`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use zenoclone_core::dynamics::{IntegratorConfig, Method};
use zenoclone_core::experiments::{AxisScale, Mode, Observable, ParamPath, SweepAxis, TimePolicy};
use zenoclone_core::model::{mhz_to_angular, NodeField, UnitMode};
use zenoclone_core::zeno::protocol_schedule;
use zenoclone_core::{InitialKind, SystemParams};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SAMPLES: usize = 151;
/// Default `simulate` window in units of the protocol time.
pub const DEFAULT_WINDOW: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Values along one sweep axis: a list or an inclusive linear range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisValues {
    List(Vec<f64>),
    Range { start: f64, stop: f64, num: usize },
}

impl AxisValues {
    fn resolve(&self) -> Vec<f64> {
        match self {
            AxisValues::List(v) => v.clone(),
            AxisValues::Range { start, stop, num } => {
                zenoclone_core::experiments::linspace(*start, *stop, *num)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    /// Column name; defaults to the path.
    #[serde(default)]
    pub name: Option<String>,
    pub path: String,
    pub values: AxisValues,
    #[serde(default)]
    pub scale: AxisScale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<AxisConfig>,
    /// Observable names such as `fidelity_w` or `clone_q2_corrected`.
    #[serde(default)]
    pub observables: Option<Vec<String>>,
    /// `protocol` (default) or `grid` over `g_t_max`/`samples`.
    #[serde(default)]
    pub time: Option<String>,
    /// Multiple of the protocol time used when `time` is `protocol`.
    #[serde(default)]
    pub time_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Option<String>,
    pub n_cavities: usize,
    pub m_atoms: usize,

    #[serde(default)]
    pub g_dimensionless: Option<f64>,
    #[serde(default)]
    pub kappa_dimensionless: Option<f64>,
    #[serde(default)]
    pub gamma_dimensionless: Option<f64>,
    #[serde(default)]
    pub beta_dimensionless: Option<f64>,

    #[serde(default)]
    pub g_mhz: Option<f64>,
    #[serde(default)]
    pub kappa_mhz: Option<f64>,
    #[serde(default)]
    pub gamma_mhz: Option<f64>,
    #[serde(default)]
    pub beta_mhz: Option<f64>,

    /// `v / g′`.
    #[serde(default)]
    pub v_factor: Option<f64>,
    /// `Ω / g′`.
    #[serde(default)]
    pub omega_factor: Option<f64>,
    /// `Ω₁ / g′`; absent selects `(√N + 1)Ω`.
    #[serde(default)]
    pub omega1_factor: Option<f64>,
    #[serde(default)]
    pub theta_rad: Option<f64>,
    #[serde(default)]
    pub delta_rad: Option<f64>,
    #[serde(default)]
    pub decay_to_f: Option<f64>,

    #[serde(default)]
    pub g_node_factors: Option<Vec<f64>>,
    #[serde(default)]
    pub v_node_factors: Option<Vec<f64>>,
    #[serde(default)]
    pub omega_node_factors: Option<Vec<f64>>,
    #[serde(default)]
    pub kappa_node_factors: Option<Vec<f64>>,
    #[serde(default)]
    pub gamma_node_factors: Option<Vec<f64>>,

    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub initial: Option<InitialKind>,
    /// End of the `simulate` window in units of `g·t`.
    #[serde(default)]
    pub g_t_max: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,

    #[serde(default)]
    pub method: Option<Method>,
    #[serde(default)]
    pub dt: Option<f64>,

    #[serde(default)]
    pub out_dir: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,

    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

impl RunConfig {
    pub fn minimal(n_cavities: usize, m_atoms: usize) -> Self {
        serde_json::from_value(serde_json::json!({ "n_cavities": n_cavities, "m_atoms": m_atoms }))
            .expect("minimal config")
    }

    pub fn unit_mode(&self) -> CliResult<UnitMode> {
        let dimless = [
            ("g_dimensionless", self.g_dimensionless),
            ("kappa_dimensionless", self.kappa_dimensionless),
            ("gamma_dimensionless", self.gamma_dimensionless),
            ("beta_dimensionless", self.beta_dimensionless),
        ];
        let physical = [
            ("g_mhz", self.g_mhz),
            ("kappa_mhz", self.kappa_mhz),
            ("gamma_mhz", self.gamma_mhz),
            ("beta_mhz", self.beta_mhz),
        ];
        let a = dimless.iter().find(|(_, v)| v.is_some());
        let b = physical.iter().find(|(_, v)| v.is_some());
        match (a, b) {
            (Some((ka, _)), Some((kb, _))) => Err(CliError::Config(format!(
                "`{ka}` and `{kb}` mix the dimensionless and physical key families"
            ))),
            (None, Some(_)) => Ok(UnitMode::Physical),
            _ => Ok(UnitMode::Dimensionless),
        }
    }

    pub fn scenario_name(&self) -> &str {
        self.scenario.as_deref().unwrap_or("simulate")
    }

    pub fn mode_resolved(&self) -> Mode {
        self.mode.unwrap_or(Mode::Effective)
    }

    pub fn initial_resolved(&self) -> InitialKind {
        self.initial.unwrap_or(InitialKind::WSeed)
    }

    /// Physical parameters; every value was checked by `SystemParams::validate`.
    pub fn to_params(&self) -> CliResult<SystemParams> {
        let mode = self.unit_mode()?;
        let mut p = SystemParams::dimensionless(self.n_cavities, self.m_atoms.max(1));
        p.m_atoms = self.m_atoms;
        p.unit_mode = mode;
        let conv = |x: f64| match mode {
            UnitMode::Physical => mhz_to_angular(x),
            UnitMode::Dimensionless => x,
        };
        let pick = |d: Option<f64>, m: Option<f64>| d.or(m).map(conv);
        if let Some(g) = pick(self.g_dimensionless, self.g_mhz) {
            p.g = g;
        } else if mode == UnitMode::Physical {
            return Err(CliError::Config(
                "`g_mhz` is required with physical units".into(),
            ));
        }
        let gp = p.g_prime();
        p.v = self.v_factor.unwrap_or(0.5) * gp;
        p.omega = self.omega_factor.unwrap_or(0.05) * gp;
        p.omega1 = self.omega1_factor.map(|f| f * gp);
        p.kappa = pick(self.kappa_dimensionless, self.kappa_mhz).unwrap_or(0.0);
        p.gamma = pick(self.gamma_dimensionless, self.gamma_mhz).unwrap_or(0.0);
        p.beta = pick(self.beta_dimensionless, self.beta_mhz).unwrap_or(0.0);
        p.theta = self.theta_rad.unwrap_or(PI / 2.0);
        p.delta = self.delta_rad.unwrap_or(0.0);
        p.decay_to_f = self.decay_to_f.unwrap_or(0.0);
        let lists = [
            ("g_node_factors", NodeField::G, &self.g_node_factors),
            ("v_node_factors", NodeField::V, &self.v_node_factors),
            (
                "omega_node_factors",
                NodeField::Omega,
                &self.omega_node_factors,
            ),
            (
                "kappa_node_factors",
                NodeField::Kappa,
                &self.kappa_node_factors,
            ),
            (
                "gamma_node_factors",
                NodeField::Gamma,
                &self.gamma_node_factors,
            ),
        ];
        for (key, field, factors) in lists {
            if let Some(f) = factors {
                if f.len() != self.n_cavities {
                    return Err(CliError::Config(format!(
                        "`{key}` has {} entries for {} nodes",
                        f.len(),
                        self.n_cavities
                    )));
                }
                let slot = p.node_vector_mut(field);
                for (v, k) in slot.iter_mut().zip(f) {
                    *v *= k;
                }
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let mut cfg = match self.method {
            Some(Method::Rk4) => IntegratorConfig::rk4(),
            Some(Method::Expm) => IntegratorConfig::expm(),
            None => zenoclone_core::experiments::default_integrator(self.mode_resolved()),
        };
        cfg.dt = self.dt;
        cfg
    }

    /// Sample times for `simulate`.
    pub fn times(&self, p: &SystemParams) -> CliResult<Vec<f64>> {
        let samples = self.samples.unwrap_or(DEFAULT_SAMPLES);
        let g_t_max = match self.g_t_max {
            Some(x) => x,
            None => DEFAULT_WINDOW * p.g * protocol_schedule(p, 0)?.t_n,
        };
        Ok(TimePolicy::Grid { g_t_max, samples }.times(p)?)
    }

    /// Copy with every default made explicit; resolving it again is a no-op.
    pub fn resolved(&self) -> CliResult<RunConfig> {
        let p = self.to_params()?;
        let mut r = self.clone();
        r.scenario = Some(self.scenario_name().to_string());
        match p.unit_mode {
            UnitMode::Dimensionless => r.g_dimensionless = Some(p.g),
            UnitMode::Physical => r.g_mhz = self.g_mhz,
        }
        r.v_factor = Some(self.v_factor.unwrap_or(0.5));
        r.omega_factor = Some(self.omega_factor.unwrap_or(0.05));
        r.theta_rad = Some(p.theta);
        r.delta_rad = Some(p.delta);
        r.decay_to_f = Some(p.decay_to_f);
        r.mode = Some(self.mode_resolved());
        r.initial = Some(self.initial_resolved());
        r.method = Some(self.integrator().method);
        r.format = Some(self.format.unwrap_or_default());
        r.out_dir = None;
        if self.sweep.is_none() {
            r.samples = Some(self.samples.unwrap_or(DEFAULT_SAMPLES));
            if r.g_t_max.is_none() {
                r.g_t_max = Some(self.times(&p)?.last().copied().unwrap_or(0.0) * p.g);
            }
        }
        Ok(r)
    }

    pub fn sweep_parts(&self) -> CliResult<(Vec<SweepAxis>, Vec<Observable>, TimePolicy)> {
        let s = self.sweep.as_ref().ok_or_else(|| {
            CliError::Config("`sweep` section is required for the sweep command".into())
        })?;
        let axes = s
            .axes
            .iter()
            .map(|a| {
                let path: ParamPath = a.path.parse().map_err(CliError::from)?;
                Ok(SweepAxis::new(
                    a.name.clone().unwrap_or_else(|| a.path.clone()),
                    path,
                    a.values.resolve(),
                    a.scale,
                ))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let default_obs = match self.initial_resolved() {
            InitialKind::WSeed => vec!["fidelity_w".to_string()],
            InitialKind::CloneInput => {
                vec!["clone_q2_raw".to_string(), "clone_q2_corrected".to_string()]
            }
        };
        let observables = s
            .observables
            .clone()
            .unwrap_or(default_obs)
            .iter()
            .map(|name| parse_observable(name))
            .collect::<CliResult<Vec<_>>>()?;
        let time = match s.time.as_deref().unwrap_or("protocol") {
            "protocol" => TimePolicy::Protocol {
                n: 0,
                scale: s.time_scale.unwrap_or(1.0),
            },
            "grid" => TimePolicy::Grid {
                g_t_max: self.g_t_max.ok_or_else(|| {
                    CliError::Config("`g_t_max` is required for a time grid".into())
                })?,
                samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            },
            other => {
                return Err(CliError::Config(format!(
                    "`sweep.time`: unknown policy `{other}`"
                )))
            }
        };
        Ok((axes, observables, time))
    }
}

pub fn parse_observable(name: &str) -> CliResult<Observable> {
    if name == "fidelity_w" {
        return Ok(Observable::WFidelity);
    }
    let bad = || CliError::Config(format!("unknown observable `{name}`"));
    let rest = name.strip_prefix("clone_q").ok_or_else(bad)?;
    let (q, frame) = rest.split_once('_').ok_or_else(bad)?;
    let qubit: usize = q.parse().map_err(|_| bad())?;
    let frame_corrected = match frame {
        "raw" => false,
        "corrected" => true,
        _ => return Err(bad()),
    };
    Ok(Observable::CloneFidelity {
        qubit,
        frame_corrected,
    })
}

fn parse_config(text: &str, origin: &str) -> CliResult<RunConfig> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
}

/// Read a config, or recover the config embedded in an emitted result file.
pub fn load(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let origin = path.display().to_string();
    if text.starts_with('#') {
        let line = text
            .lines()
            .find_map(|l| l.strip_prefix(crate::output::CONFIG_PREFIX))
            .ok_or_else(|| CliError::Config(format!("{origin}: no embedded configuration line")))?;
        return parse_config(line, &origin);
    }
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
    if let Some(embedded) = value.get("config").filter(|_| value.get("rows").is_some()) {
        return serde_json::from_value(embedded.clone())
            .map_err(|e| CliError::Config(format!("{origin}: {e}")));
    }
    serde_json::from_value(value).map_err(|e| CliError::Config(format!("{origin}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: Value) -> CliResult<RunConfig> {
        serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))
    }

    #[test]
    fn unknown_key_is_named() {
        let err = cfg(serde_json::json!({"n_cavities": 3, "m_atoms": 100, "omgea_factor": 0.1}))
            .unwrap_err();
        assert!(err.to_string().contains("omgea_factor"));
    }

    #[test]
    fn mixed_families_rejected() {
        let c = cfg(serde_json::json!({"n_cavities": 3, "m_atoms": 100, "g_dimensionless": 0.1, "kappa_mhz": 1.0})).unwrap();
        let err = c.to_params().unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(
            err.to_string().contains("g_dimensionless") && err.to_string().contains("kappa_mhz")
        );
    }

    #[test]
    fn physical_units_convert() {
        let c = cfg(serde_json::json!({
            "n_cavities": 3, "m_atoms": 100, "g_mhz": 18.5, "kappa_mhz": 53.0, "gamma_mhz": 3.0, "beta_mhz": 0.15
        }))
        .unwrap();
        let p = c.to_params().unwrap();
        assert_eq!(p.unit_mode, UnitMode::Physical);
        assert!((p.g_prime() - 2.0 * PI * 185.0).abs() < 1e-9);
        assert!((p.kappa - 2.0 * PI * 53.0).abs() < 1e-12);
        assert!((p.v - 0.5 * p.g_prime()).abs() < 1e-9);
    }

    #[test]
    fn invalid_value_names_key() {
        let c =
            cfg(serde_json::json!({"n_cavities": 3, "m_atoms": 100, "theta_rad": 4.0})).unwrap();
        assert!(c.to_params().unwrap_err().to_string().contains("theta_rad"));
        let c =
            cfg(serde_json::json!({"n_cavities": 3, "m_atoms": 100, "g_node_factors": [1.0, 1.1]}))
                .unwrap();
        assert!(c
            .to_params()
            .unwrap_err()
            .to_string()
            .contains("g_node_factors"));
    }

    #[test]
    fn resolution_is_idempotent() {
        let c = RunConfig::minimal(3, 100);
        let r = c.resolved().unwrap();
        assert_eq!(r.resolved().unwrap(), r);
        assert_eq!(r.to_params().unwrap(), c.to_params().unwrap());
    }

    #[test]
    fn observable_names() {
        assert_eq!(
            parse_observable("fidelity_w").unwrap(),
            Observable::WFidelity
        );
        assert_eq!(
            parse_observable("clone_q3_corrected").unwrap(),
            Observable::CloneFidelity {
                qubit: 3,
                frame_corrected: true
            }
        );
        assert!(parse_observable("clone_q_raw").is_err());
    }
}
