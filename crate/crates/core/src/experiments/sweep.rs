use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    evolve_conditional, evolve_schrodinger, lindblad_trajectory, IntegratorConfig,
};
use crate::error::{Error, Result};
use crate::linalg::{c, CVector};
use crate::model::{
    build_collapse_ops, build_h_total, initial_state, BasisLabel, DensityMatrix, InitialKind,
    NodeField, StateVector, SystemParams,
};
use crate::observables::{
    clone_fidelity, reduce_to_logical_qubit, w_state_fidelity, SubspaceState,
};
use crate::zeno::{analytic_state, protocol_schedule};

use super::table::{Layout, ResultRow, ResultTable, RowMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Closed-form adiabatically eliminated dynamics.
    Effective,
    /// Full Hamiltonian, unitary.
    FullClosed,
    /// Full Hamiltonian with every decay channel.
    FullOpen,
    /// Full Hamiltonian, no-jump trajectory (unnormalized).
    FullConditional,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Effective => "effective",
            Mode::FullClosed => "full-closed",
            Mode::FullOpen => "full-open",
            Mode::FullConditional => "full-conditional",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "effective" => Ok(Mode::Effective),
            "full-closed" | "closed" => Ok(Mode::FullClosed),
            "full-open" | "open" => Ok(Mode::FullOpen),
            "full-conditional" | "conditional" => Ok(Mode::FullConditional),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// A state produced by one of the [`Mode`]s.
#[derive(Debug, Clone, PartialEq)]
pub enum Evolved {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl SubspaceState for Evolved {
    fn dim(&self) -> usize {
        match self {
            Evolved::Pure(s) => s.dim(),
            Evolved::Mixed(r) => r.dim(),
        }
    }

    fn element(&self, i: usize, j: usize) -> crate::linalg::C64 {
        match self {
            Evolved::Pure(s) => s.element(i, j),
            Evolved::Mixed(r) => r.element(i, j),
        }
    }
}

/// Evolve from `kind` and sample at ascending `times`.
pub fn evolve_mode(
    params: &SystemParams,
    mode: Mode,
    kind: InitialKind,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Evolved>> {
    let psi0 = initial_state(params, kind)?;
    match mode {
        Mode::Effective => times
            .iter()
            .map(|&t| {
                let w = analytic_state(params, t)?;
                Ok(Evolved::Pure(match kind {
                    InitialKind::WSeed => w,
                    InitialKind::CloneInput => {
                        // |G⟩ is stationary; only the f₁ part moves
                        let g = psi0.amplitude(BasisLabel::GlobalGround);
                        let f = psi0.amplitude(BasisLabel::FExc(1));
                        let mut v: CVector = w.into_vector() * f;
                        v[BasisLabel::GlobalGround.index()] += g;
                        StateVector::new(v)
                    }
                }))
            })
            .collect(),
        Mode::FullClosed => {
            let h = build_h_total(params)?;
            times
                .iter()
                .map(|&t| evolve_schrodinger(&h, &psi0, t, cfg).map(Evolved::Pure))
                .collect()
        }
        Mode::FullOpen => {
            let h = build_h_total(params)?;
            let ops = build_collapse_ops(params)?;
            lindblad_trajectory(&h, &ops, &psi0.to_density(), times, cfg)
                .map(|v| v.into_iter().map(Evolved::Mixed).collect())
        }
        Mode::FullConditional => {
            let h = build_h_total(params)?;
            let ops = build_collapse_ops(params)?;
            times
                .iter()
                .map(|&t| evolve_conditional(&h, &ops, &psi0, t).map(Evolved::Pure))
                .collect()
        }
    }
}

/// Default integrator for a mode: exponential for closed, RK4 for open.
pub fn default_integrator(mode: Mode) -> IntegratorConfig {
    match mode {
        Mode::FullOpen => IntegratorConfig::rk4(),
        _ => IntegratorConfig::expm(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    WFidelity,
    CloneFidelity { qubit: usize, frame_corrected: bool },
}

impl Observable {
    pub fn name(&self) -> String {
        match self {
            Observable::WFidelity => "fidelity_w".into(),
            Observable::CloneFidelity {
                qubit,
                frame_corrected,
            } => {
                format!(
                    "clone_q{qubit}_{}",
                    if *frame_corrected { "corrected" } else { "raw" }
                )
            }
        }
    }

    pub fn initial_kind(&self) -> InitialKind {
        match self {
            Observable::WFidelity => InitialKind::WSeed,
            Observable::CloneFidelity { .. } => InitialKind::CloneInput,
        }
    }

    /// Evaluate against the target implied by `params` (θ, δ).
    pub fn evaluate<S: SubspaceState + ?Sized>(
        &self,
        params: &SystemParams,
        state: &S,
    ) -> Result<f64> {
        match *self {
            Observable::WFidelity => Ok(w_state_fidelity(state)),
            Observable::CloneFidelity {
                qubit,
                frame_corrected,
            } => {
                let q = reduce_to_logical_qubit(state, qubit)?;
                Ok(clone_fidelity(
                    &q,
                    params.theta,
                    params.delta,
                    frame_corrected,
                ))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimePolicy {
    /// `scale·t_n` with `t_n = (2n+1)π/μ` for the point's own nominal parameters.
    Protocol { n: u32, scale: f64 },
    /// `samples` points from `g·t = 0` to `g_t_max`.
    Grid { g_t_max: f64, samples: usize },
}

impl TimePolicy {
    pub fn protocol() -> Self {
        TimePolicy::Protocol { n: 0, scale: 1.0 }
    }

    pub fn times(&self, params: &SystemParams) -> Result<Vec<f64>> {
        match *self {
            TimePolicy::Protocol { n, scale } => {
                if !(scale >= 0.0 && scale.is_finite()) {
                    return Err(Error::Config(format!("time scale {scale} must be ≥ 0")));
                }
                Ok(vec![protocol_schedule(params, n)?.t_n * scale])
            }
            TimePolicy::Grid { g_t_max, samples } => {
                if samples < 1 || !(g_t_max >= 0.0 && g_t_max.is_finite()) {
                    return Err(Error::Config(format!(
                        "time grid needs samples ≥ 1 and g_t_max ≥ 0, got {samples}, {g_t_max}"
                    )));
                }
                if params.g <= 0.0 {
                    return Err(Error::Config("a g·t grid needs g > 0".into()));
                }
                let t_max = g_t_max / params.g;
                Ok(linspace(0.0, t_max, samples))
            }
        }
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// A settable scalar inside [`SystemParams`], e.g. `omega` or `g[2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ParamPath {
    NCavities,
    MAtoms,
    G,
    V,
    Omega,
    Omega1,
    Kappa,
    Gamma,
    Beta,
    Theta,
    Delta,
    DecayToF,
    Node(NodeField, usize),
}

fn field_name(f: NodeField) -> &'static str {
    match f {
        NodeField::G => "g",
        NodeField::V => "v",
        NodeField::Omega => "omega",
        NodeField::Kappa => "kappa",
        NodeField::Gamma => "gamma",
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParamPath::NCavities => "n_cavities",
            ParamPath::MAtoms => "m_atoms",
            ParamPath::G => "g",
            ParamPath::V => "v",
            ParamPath::Omega => "omega",
            ParamPath::Omega1 => "omega1",
            ParamPath::Kappa => "kappa",
            ParamPath::Gamma => "gamma",
            ParamPath::Beta => "beta",
            ParamPath::Theta => "theta",
            ParamPath::Delta => "delta",
            ParamPath::DecayToF => "decay_to_f",
            ParamPath::Node(field, k) => return write!(f, "{}[{k}]", field_name(*field)),
        };
        f.write_str(s)
    }
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown parameter path `{s}`"));
        let t = s.trim();
        if let Some(open) = t.find('[') {
            let inner = t[open + 1..].strip_suffix(']').ok_or_else(bad)?;
            let k: usize = inner.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            let field = match &t[..open] {
                "g" => NodeField::G,
                "v" => NodeField::V,
                "omega" => NodeField::Omega,
                "kappa" => NodeField::Kappa,
                "gamma" => NodeField::Gamma,
                _ => return Err(bad()),
            };
            return Ok(ParamPath::Node(field, k));
        }
        Ok(match t {
            "n_cavities" | "n" => ParamPath::NCavities,
            "m_atoms" | "m" => ParamPath::MAtoms,
            "g" => ParamPath::G,
            "v" => ParamPath::V,
            "omega" => ParamPath::Omega,
            "omega1" => ParamPath::Omega1,
            "kappa" => ParamPath::Kappa,
            "gamma" => ParamPath::Gamma,
            "beta" => ParamPath::Beta,
            "theta" => ParamPath::Theta,
            "delta" => ParamPath::Delta,
            "decay_to_f" => ParamPath::DecayToF,
            _ => return Err(bad()),
        })
    }
}

impl TryFrom<String> for ParamPath {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ParamPath> for String {
    fn from(p: ParamPath) -> String {
        p.to_string()
    }
}

fn as_count(path: ParamPath, x: f64) -> Result<usize> {
    if x.fract() != 0.0 || x < 1.0 || !x.is_finite() {
        return Err(Error::Config(format!(
            "{path} needs a positive integer, got {x}"
        )));
    }
    Ok(x as usize)
}

impl ParamPath {
    pub fn get(&self, p: &SystemParams) -> f64 {
        match *self {
            ParamPath::NCavities => p.n_cavities as f64,
            ParamPath::MAtoms => p.m_atoms as f64,
            ParamPath::G => p.g,
            ParamPath::V => p.v,
            ParamPath::Omega => p.omega,
            ParamPath::Omega1 => p.omega1_resolved(),
            ParamPath::Kappa => p.kappa,
            ParamPath::Gamma => p.gamma,
            ParamPath::Beta => p.beta,
            ParamPath::Theta => p.theta,
            ParamPath::Delta => p.delta,
            ParamPath::DecayToF => p.decay_to_f,
            ParamPath::Node(field, k) => match field {
                NodeField::G => p.g_at(k),
                NodeField::V => p.v_at(k),
                NodeField::Omega => p.omega_at(k),
                NodeField::Kappa => p.kappa_at(k),
                NodeField::Gamma => p.gamma_at(k),
            },
        }
    }

    pub fn set(&self, p: &mut SystemParams, x: f64) -> Result<()> {
        match *self {
            ParamPath::NCavities => {
                p.n_cavities = as_count(*self, x)?;
                if !p.overrides.is_empty() {
                    return Err(Error::Config(
                        "n_cavities cannot vary alongside per-node values".into(),
                    ));
                }
            }
            ParamPath::MAtoms => p.m_atoms = as_count(*self, x)?,
            ParamPath::G => p.g = x,
            ParamPath::V => p.v = x,
            ParamPath::Omega => p.omega = x,
            ParamPath::Omega1 => p.omega1 = Some(x),
            ParamPath::Kappa => p.kappa = x,
            ParamPath::Gamma => p.gamma = x,
            ParamPath::Beta => p.beta = x,
            ParamPath::Theta => p.theta = x,
            ParamPath::Delta => p.delta = x,
            ParamPath::DecayToF => p.decay_to_f = x,
            ParamPath::Node(field, k) => {
                if k > p.n_cavities {
                    return Err(Error::Config(format!(
                        "{self}: node index beyond N = {}",
                        p.n_cavities
                    )));
                }
                p.node_vector_mut(field)[k - 1] = x;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisScale {
    /// Values are written as given.
    #[default]
    Absolute,
    /// Values are multiples of the baseline `g′ = √M·g`.
    GPrime,
    /// Values are relative deviations `x → x₀(1 + value)`.
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub name: String,
    pub path: ParamPath,
    pub values: Vec<f64>,
    #[serde(default)]
    pub scale: AxisScale,
}

impl SweepAxis {
    pub fn new(
        name: impl Into<String>,
        path: ParamPath,
        values: Vec<f64>,
        scale: AxisScale,
    ) -> Self {
        Self {
            name: name.into(),
            path,
            values,
            scale,
        }
    }

    fn apply(&self, base: &SystemParams, p: &mut SystemParams, value: f64) -> Result<()> {
        let x = match self.scale {
            AxisScale::Absolute => value,
            AxisScale::GPrime => value * base.g_prime(),
            AxisScale::Relative => self.path.get(base) * (1.0 + value),
        };
        self.path.set(p, x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub scenario: String,
    pub base: SystemParams,
    pub axes: Vec<SweepAxis>,
    pub mode: Mode,
    pub observables: Vec<Observable>,
    pub time: TimePolicy,
    #[serde(default)]
    pub integrator: Option<IntegratorConfig>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config(format!(
                "a sweep takes 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        for axis in &self.axes {
            if axis.values.is_empty() {
                return Err(Error::Config(format!("axis {} has no values", axis.name)));
            }
            if axis.values.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!(
                    "axis {} has a non-finite value",
                    axis.name
                )));
            }
            if axis.values.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::Config(format!(
                    "axis {} must be sorted ascending",
                    axis.name
                )));
            }
        }
        if self.observables.is_empty() {
            return Err(Error::Config(
                "a sweep needs at least one observable".into(),
            ));
        }
        let kind = self.observables[0].initial_kind();
        if self.observables.iter().any(|o| o.initial_kind() != kind) {
            return Err(Error::Config(
                "W and clone observables need different initial states".into(),
            ));
        }
        self.base.validate()
    }

    /// Grid points in row-major order, first axis outermost.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut pts = vec![Vec::new()];
        for axis in &self.axes {
            pts = pts
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |&x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        pts
    }

    pub fn params_at(&self, point: &[f64]) -> Result<SystemParams> {
        let mut p = self.base.clone();
        for (axis, &x) in self.axes.iter().zip(point) {
            axis.apply(&self.base, &mut p, x)?;
        }
        p.validate()?;
        Ok(p)
    }
}

/// Evaluate `observables` for `params` at every time of `policy`.
pub fn evaluate_point(
    scenario: &str,
    params: &SystemParams,
    mode: Mode,
    observables: &[Observable],
    policy: &TimePolicy,
    cfg: &IntegratorConfig,
    axes: Vec<(String, super::Cell)>,
) -> Result<Vec<ResultRow>> {
    let kind = observables
        .first()
        .ok_or_else(|| Error::Config("no observables".into()))?
        .initial_kind();
    let times = policy.times(params)?;
    let states = evolve_mode(params, mode, kind, &times, cfg)?;
    let meta = match protocol_schedule(params, 0) {
        Ok(s) => RowMeta {
            mu: s.mu,
            t0: s.t_n,
            g_prime: params.g_prime(),
        },
        Err(_) => RowMeta {
            mu: f64::NAN,
            t0: f64::NAN,
            g_prime: params.g_prime(),
        },
    };
    times
        .iter()
        .zip(&states)
        .map(|(&t, state)| {
            let values = observables
                .iter()
                .map(|o| Ok((o.name(), o.evaluate(params, state)?)))
                .collect::<Result<Vec<_>>>()?;
            let row = ResultRow {
                scenario: scenario.to_string(),
                axes: axes.clone(),
                t,
                g_t: params.g * t,
                mode,
                observables: values,
                meta,
            };
            row.check_range()?;
            Ok(row)
        })
        .collect()
}

/// Run every grid point in parallel; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<ResultTable> {
    spec.validate()?;
    let cfg = spec
        .integrator
        .unwrap_or_else(|| default_integrator(spec.mode));
    let chunks = spec
        .points()
        .into_par_iter()
        .map(|point| {
            let params = spec.params_at(&point)?;
            let axes = spec
                .axes
                .iter()
                .zip(&point)
                .map(|(a, &x)| (a.name.clone(), super::Cell::Num(x)))
                .collect();
            evaluate_point(
                &spec.scenario,
                &params,
                spec.mode,
                &spec.observables,
                &spec.time,
                &cfg,
                axes,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(
        spec.scenario.clone(),
        Layout {
            time: matches!(spec.time, TimePolicy::Grid { .. }),
            meta: true,
        },
    );
    table.rows = chunks.into_iter().flatten().collect();
    table.metadata.insert(
        "spec".into(),
        serde_json::to_value(spec).map_err(|e| Error::Config(e.to_string()))?,
    );
    Ok(table)
}

/// `cos(θ/2)|G⟩ + sin(θ/2)e^{iδ}|W⟩`, the ideal output of the cloner.
pub fn ideal_clone_state(params: &SystemParams) -> StateVector {
    let dim = params.dim();
    let mut v = CVector::zeros(dim);
    let half = params.theta / 2.0;
    v[BasisLabel::GlobalGround.index()] = c(half.cos());
    let amp = crate::linalg::C64::from_polar(half.sin() / (params.n() as f64).sqrt(), params.delta);
    for k in 1..=params.n() {
        v[BasisLabel::FExc(k).index()] = amp;
    }
    StateVector::new(v)
}
