//! Scenario files: schema, overrides, defaults and validation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{SteadyCriteria, TimeGrid};
use crate::error::{Error, Result};
use crate::hilbert::space::{CAVITY1, CAVITY2, MO, NETWORK_LABELS};
use crate::hilbert::CompositeSpace;
use crate::measures::{Quadrature, WignerSpec};
use crate::model::{ModeRecipe, PumpTarget, SystemParams, DEFAULT_MAX_TAIL};

/// Boson truncations used when a transfer scenario leaves them unset.
pub const TRANSFER_TRUNCATIONS: [usize; 3] = [8, 6, 8];
/// Boson truncations used when a steady-state scenario leaves them unset.
pub const STEADY_TRUNCATIONS: [usize; 3] = [5, 5, 5];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpaceConfig {
    pub c1: Option<usize>,
    pub m: Option<usize>,
    pub c2: Option<usize>,
}

impl SpaceConfig {
    pub fn truncations(&self) -> [usize; 3] {
        let d = TRANSFER_TRUNCATIONS;
        [self.c1.unwrap_or(d[0]), self.m.unwrap_or(d[1]), self.c2.unwrap_or(d[2])]
    }

    pub fn build(&self) -> Result<CompositeSpace> {
        let [c1, m, c2] = self.truncations();
        CompositeSpace::network(c1, m, c2)
    }

    fn slot(&mut self, mode: &str) -> Option<&mut Option<usize>> {
        match mode {
            "c1" => Some(&mut self.c1),
            "m" => Some(&mut self.m),
            "c2" => Some(&mut self.c2),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitialStateConfig {
    pub a1: ModeRecipe,
    pub a2: ModeRecipe,
    pub c1: ModeRecipe,
    pub m: ModeRecipe,
    pub c2: ModeRecipe,
    /// Largest analytic population allowed beyond a truncation.
    pub max_tail: f64,
    /// On the state-vector path, thermal factors with n̄ up to this value are
    /// replaced by vacuum.
    pub vacuum_thermal_below: f64,
}

impl Default for InitialStateConfig {
    fn default() -> Self {
        InitialStateConfig {
            a1: ModeRecipe::Ground,
            a2: ModeRecipe::Ground,
            c1: ModeRecipe::Ground,
            m: ModeRecipe::Ground,
            c2: ModeRecipe::Ground,
            max_tail: DEFAULT_MAX_TAIL,
            vacuum_thermal_below: 0.01,
        }
    }
}

impl InitialStateConfig {
    /// Recipes in canonical part order.
    pub fn recipes(&self) -> [ModeRecipe; 5] {
        [self.a1, self.a2, self.c1, self.m, self.c2]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HamiltonianConfig {
    pub effective: bool,
    pub drive: bool,
    pub squeeze_pump: Vec<PumpTarget>,
    /// Keep the oscillating terms of the rotating-frame interaction.
    pub time_dependent: bool,
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        HamiltonianConfig {
            effective: true,
            drive: true,
            squeeze_pump: Vec::new(),
            time_dependent: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DissipationConfig {
    pub enabled: bool,
}

/// Where t₂ comes from: the argmax of a fidelity series inside a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct T2Config {
    pub measurement: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<T2Config>,
}

impl EvolutionConfig {
    pub fn grid(&self) -> TimeGrid {
        TimeGrid {
            t0: self.t0,
            t1: self.t1,
            samples: self.samples,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SteadyConfig {
    #[serde(default)]
    pub criteria: SteadyCriteria,
}

/// One swept knob. Each target path receives `multiplier × value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub name: String,
    pub targets: BTreeMap<String, f64>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Points are the Cartesian product of all axes, or with `zip` the
    /// k-th value of every axis together.
    pub axes: Vec<SweepAxis>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub zip: bool,
    pub inner: Box<RunConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RwaConfig {
    pub t1: f64,
    pub samples: usize,
    /// λ/ω_m values to compare; the first is the reference regime.
    pub lambdas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunConfig {
    TimeEvolution(EvolutionConfig),
    SteadyState(SteadyConfig),
    Sweep(SweepConfig),
    RwaValidation(RwaConfig),
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::TimeEvolution(EvolutionConfig {
            t0: 0.0,
            t1: 10.0,
            samples: 101,
            rtol: None,
            t2: None,
        })
    }
}

impl RunConfig {
    fn innermost(&self) -> &RunConfig {
        match self {
            RunConfig::Sweep(s) => s.inner.innermost(),
            other => other,
        }
    }

    fn set_rtol(&mut self, tol: f64) {
        match self {
            RunConfig::TimeEvolution(e) => e.rtol = Some(tol),
            RunConfig::SteadyState(s) => s.criteria.rtol = tol,
            RunConfig::Sweep(s) => s.inner.set_rtol(tol),
            RunConfig::RwaValidation(r) => r.rtol = Some(tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measurement {
    /// Fidelity of mode `target` against the initial recipe of `reference`.
    Fidelity {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        reference: String,
        target: String,
    },
    Negativity {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        pair: [String; 2],
    },
    Contangle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// Phase defaults to `params.phi` of the mode.
    Quadrature {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        mode: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phase: Option<f64>,
        #[serde(default = "default_quadrature")]
        quadrature: Quadrature,
    },
    Number {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        mode: String,
    },
    /// Population of one product basis state (a1, a2, c1, m, c2).
    Population {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        label: [usize; 5],
    },
    /// Population of level `level` of one part, summed over the rest.
    PartPopulation {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        part: String,
        level: usize,
    },
    /// Wigner snapshots at the samples nearest to `times`; no table column.
    Wigner {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        mode: String,
        #[serde(default)]
        times: Vec<f64>,
        #[serde(default)]
        grid: WignerSpec,
    },
}

fn default_quadrature() -> Quadrature {
    Quadrature::X
}

impl Measurement {
    /// Column or file-stem name.
    pub fn name(&self) -> String {
        match self {
            Measurement::Fidelity { name, target, .. } => name.clone().unwrap_or(format!("F_{target}")),
            Measurement::Negativity { name, pair } => name.clone().unwrap_or(format!("N_{}_{}", pair[0], pair[1])),
            Measurement::Contangle { name } => name.clone().unwrap_or("contangle".into()),
            Measurement::Quadrature { name, mode, quadrature, .. } => {
                name.clone().unwrap_or(format!("QF{quadrature:?}_{mode}"))
            }
            Measurement::Number { name, mode } => name.clone().unwrap_or(format!("n_{mode}")),
            Measurement::Population { name, label } => name.clone().unwrap_or(format!(
                "P_{}",
                label.iter().map(|n| n.to_string()).collect::<String>()
            )),
            Measurement::PartPopulation { name, part, level } => {
                name.clone().unwrap_or(format!("P_{part}={level}"))
            }
            Measurement::Wigner { name, mode, .. } => name.clone().unwrap_or(format!("wigner_{mode}")),
        }
    }

    pub fn is_scalar(&self) -> bool {
        !matches!(self, Measurement::Wigner { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    /// Defaults to `out/<name>`.
    pub dir: Option<String>,
    pub results: String,
    pub metadata: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            results: "results.csv".into(),
            metadata: "metadata.json".into(),
        }
    }
}

/// A fully resolved experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub space: SpaceConfig,
    #[serde(default)]
    pub params: SystemParams,
    #[serde(default)]
    pub initial_state: InitialStateConfig,
    #[serde(default)]
    pub hamiltonian: HamiltonianConfig,
    #[serde(default)]
    pub dissipation: DissipationConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub measurements: Vec<Measurement>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Command-line style edits applied before validation.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    /// `path=value`; the value is JSON, or a bare string if it does not parse.
    pub set: Vec<String>,
    /// `mode=N` for mode in c1, m, c2.
    pub truncation: Vec<String>,
    pub tolerance: Option<f64>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        self.set.is_empty() && self.truncation.is_empty() && self.tolerance.is_none()
    }
}

fn split_assignment(s: &str) -> Result<(&str, &str)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| Error::config(s, "expected key=value"))
}

/// Write `v` at a dotted path with optional `[i]` indices, creating objects
/// on the way.
pub fn set_path(root: &mut Value, path: &str, v: Value) -> Result<()> {
    let mut cur = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (si, seg) in segments.iter().enumerate() {
        let (key, idx) = match seg.find('[') {
            Some(p) => (&seg[..p], Some(&seg[p..])),
            None => (*seg, None),
        };
        if key.is_empty() {
            return Err(Error::config(path, "empty path segment"));
        }
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| Error::config(path, format!("`{key}` is not inside an object")))?;
        let last = si + 1 == segments.len() && idx.is_none();
        if last {
            obj.insert(key.to_string(), v);
            return Ok(());
        }
        cur = obj.entry(key).or_insert_with(|| Value::Object(Default::default()));
        if let Some(idx) = idx {
            let ids: Vec<usize> = idx
                .trim_start_matches('[')
                .trim_end_matches(']')
                .split("][")
                .map(|i| i.parse().map_err(|_| Error::config(path, format!("bad index `{i}`"))))
                .collect::<Result<_>>()?;
            for (k, i) in ids.iter().enumerate() {
                let arr = cur
                    .as_array_mut()
                    .ok_or_else(|| Error::config(path, format!("`{key}` is not an array")))?;
                let len = arr.len();
                let slot = arr
                    .get_mut(*i)
                    .ok_or_else(|| Error::config(path, format!("index {i} out of range 0..{len}")))?;
                if si + 1 == segments.len() && k + 1 == ids.len() {
                    *slot = v;
                    return Ok(());
                }
                cur = slot;
            }
        }
    }
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

impl Scenario {
    /// Read, override, deserialize and validate a scenario file.
    pub fn from_path(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, overrides)
    }

    pub fn from_json_str(text: &str, overrides: &Overrides) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::config("<root>", format!("invalid JSON: {e}")))?;
        Self::from_value(value, overrides)
    }

    pub fn from_value(mut value: Value, overrides: &Overrides) -> Result<Self> {
        for s in &overrides.set {
            let (k, v) = split_assignment(s)?;
            set_path(&mut value, k, parse_value(v))?;
        }
        let mut unknown = Vec::new();
        let mut scenario: Scenario = serde_ignored::deserialize(&value, |p| unknown.push(p.to_string()))
            .map_err(|e| Error::config("<root>", e.to_string()))?;
        if !unknown.is_empty() {
            return Err(Error::UnknownKeys(unknown));
        }
        for t in &overrides.truncation {
            let (mode, n) = split_assignment(t)?;
            let n: usize = n
                .parse()
                .map_err(|_| Error::config(format!("space.{mode}"), format!("bad truncation `{n}`")))?;
            *scenario
                .space
                .slot(mode)
                .ok_or_else(|| Error::config(format!("space.{mode}"), "truncatable modes are c1, m, c2"))? = Some(n);
        }
        if let Some(tol) = overrides.tolerance {
            scenario.run.set_rtol(tol);
        }
        scenario.resolve();
        scenario.validate()?;
        Ok(scenario)
    }

    /// Fill every defaulted field that depends on other fields.
    fn resolve(&mut self) {
        let defaults = match self.run.innermost() {
            RunConfig::SteadyState(_) => STEADY_TRUNCATIONS,
            _ => TRANSFER_TRUNCATIONS,
        };
        for (slot, d) in [&mut self.space.c1, &mut self.space.m, &mut self.space.c2]
            .into_iter()
            .zip(defaults)
        {
            slot.get_or_insert(d);
        }
        if self.output.dir.is_none() {
            self.output.dir = Some(format!("out/{}", self.name));
        }
        if let RunConfig::TimeEvolution(e) = &mut self.run {
            if e.t2.is_none() {
                e.t2 = default_t2(&self.measurements);
            }
        }
        if let RunConfig::Sweep(s) = &mut self.run {
            if let RunConfig::TimeEvolution(e) = s.inner.as_mut() {
                if e.t2.is_none() {
                    e.t2 = default_t2(&self.measurements);
                }
            }
        }
    }

    /// True when the run integrates the Lindblad equation.
    pub fn uses_density_path(&self) -> bool {
        self.dissipation.enabled
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        self.params.validate()?;
        let [c1, m, c2] = self.space.truncations();
        for (label, n) in [("c1", c1), ("m", m), ("c2", c2)] {
            if n < 2 {
                return Err(Error::config(format!("space.{label}"), "truncation must be >= 2"));
            }
        }
        let space = self.space.build()?;
        let init = &self.initial_state;
        if !(init.max_tail > 0.0 && init.max_tail < 1.0) {
            return Err(Error::config("initial_state.max_tail", "must lie in (0, 1)"));
        }
        if !(init.vacuum_thermal_below >= 0.0) {
            return Err(Error::config("initial_state.vacuum_thermal_below", "must be >= 0"));
        }
        for (k, (r, part)) in init.recipes().iter().zip(space.parts()).enumerate() {
            let at = format!("initial_state.{}", NETWORK_LABELS[k]);
            match *r {
                ModeRecipe::Fock(n) if n >= part.dim() => {
                    return Err(Error::config(at, format!("level {n} outside truncation {}", part.dim())))
                }
                ModeRecipe::Squeezed { r, theta } if !(r.is_finite() && theta.is_finite() && r >= 0.0) => {
                    return Err(Error::config(at, "squeezing needs finite r >= 0"))
                }
                ModeRecipe::Cat { re, im } if !(re.is_finite() && im.is_finite()) => {
                    return Err(Error::config(at, "cat amplitude must be finite"))
                }
                ModeRecipe::Thermal(n) if !(n.is_finite() && n >= 0.0) => {
                    return Err(Error::config(at, "thermal n̄ must be finite and >= 0"))
                }
                ModeRecipe::Squeezed { .. } | ModeRecipe::Cat { .. } | ModeRecipe::Thermal(_) if k < 2 => {
                    return Err(Error::config(at, "atoms accept only ground or fock"))
                }
                _ => {}
            }
        }

        let h = &self.hamiltonian;
        if h.effective || h.time_dependent {
            self.params.require_blue_detuned()?;
        }
        if h.time_dependent && !h.effective {
            return Err(Error::config(
                "hamiltonian.time_dependent",
                "the oscillating terms extend the effective Hamiltonian; set `effective` too",
            ));
        }
        if h.time_dependent && self.dissipation.enabled {
            return Err(Error::config(
                "hamiltonian.time_dependent",
                "time-dependent runs use the lossless state-vector path",
            ));
        }
        let rates = self.params.is_dissipative();
        if self.dissipation.enabled && !rates {
            return Err(Error::config("dissipation.enabled", "enabled but every decay rate is zero"));
        }
        if !self.dissipation.enabled && rates {
            return Err(Error::config(
                "dissipation.enabled",
                "decay rates are nonzero; enable dissipation or zero them",
            ));
        }
        if !self.dissipation.enabled && rates {
            return Err(Error::config(
                "dissipation.enabled",
                "nonzero decay rates require `enabled: true` (the lossless path would ignore them)",
            ));
        }
        self.validate_run(&self.run, "run", &space)?;
        self.validate_measurements(&space)?;
        Ok(())
    }

    fn validate_run(&self, run: &RunConfig, at: &str, space: &CompositeSpace) -> Result<()> {
        match run {
            RunConfig::TimeEvolution(e) => {
                e.grid()
                    .validate()
                    .map_err(|err| Error::config(format!("{at}.time_evolution"), err.to_string()))?;
                check_rtol(e.rtol, &format!("{at}.time_evolution.rtol"))?;
                if let Some(t2) = &e.t2 {
                    let found = self.measurements.iter().any(|m| {
                        matches!(m, Measurement::Fidelity { .. }) && m.name() == t2.measurement
                    });
                    if !found {
                        return Err(Error::config(
                            format!("{at}.time_evolution.t2.measurement"),
                            format!("`{}` is not a fidelity measurement", t2.measurement),
                        ));
                    }
                    if let Some([a, b]) = t2.window {
                        if !(a.is_finite() && b.is_finite() && a < b) {
                            return Err(Error::config(format!("{at}.time_evolution.t2.window"), "need t_a < t_b"));
                        }
                    }
                }
            }
            RunConfig::SteadyState(s) => {
                let c = &s.criteria;
                let at = format!("{at}.steady_state.criteria");
                if !self.dissipation.enabled {
                    return Err(Error::config(at, "steady state needs dissipation"));
                }
                let positive = [c.residual_tol, c.observable_tol, c.max_time, c.rtol];
                if positive.iter().any(|v| !(v.is_finite() && *v > 0.0))
                    || c.window.is_some_and(|w| !(w > 0.0))
                    || c.check_every.is_some_and(|w| !(w > 0.0))
                {
                    return Err(Error::config(at, "tolerances, window, check spacing and max_time must be > 0"));
                }
            }
            RunConfig::Sweep(s) => {
                let at = format!("{at}.sweep");
                if s.axes.is_empty() {
                    return Err(Error::config(format!("{at}.axes"), "need at least one axis"));
                }
                let mut names = BTreeSet::new();
                for (i, ax) in s.axes.iter().enumerate() {
                    let here = format!("{at}.axes[{i}]");
                    if !names.insert(ax.name.as_str()) {
                        return Err(Error::config(here, format!("duplicate axis `{}`", ax.name)));
                    }
                    if ax.values.is_empty() || ax.values.iter().any(|v| !v.is_finite()) {
                        return Err(Error::config(format!("{here}.values"), "need finite values"));
                    }
                    if ax.targets.is_empty() {
                        return Err(Error::config(format!("{here}.targets"), "need at least one target"));
                    }
                }
                if s.zip && s.axes.iter().any(|a| a.values.len() != s.axes[0].values.len()) {
                    return Err(Error::config(format!("{at}.axes"), "zipped axes need equal lengths"));
                }
                match s.inner.as_ref() {
                    RunConfig::Sweep(_) => return Err(Error::config(format!("{at}.inner"), "sweeps do not nest")),
                    RunConfig::RwaValidation(_) => {
                        return Err(Error::config(format!("{at}.inner"), "validation runs are not sweepable"))
                    }
                    inner => self.validate_run(inner, &format!("{at}.inner"), space)?,
                }
            }
            RunConfig::RwaValidation(r) => {
                let at = format!("{at}.rwa_validation");
                if self.dissipation.enabled {
                    return Err(Error::config(at, "validation runs are lossless"));
                }
                TimeGrid::new(0.0, r.t1, r.samples).map_err(|e| Error::config(&at, e.to_string()))?;
                check_rtol(r.rtol, &format!("{at}.rtol"))?;
                if r.lambdas.is_empty() {
                    return Err(Error::config(format!("{at}.lambdas"), "need at least one value"));
                }
                for l in &r.lambdas {
                    if !(l.is_finite() && *l >= 0.0 && *l <= crate::dynamics::rwa::MAX_LAMBDA_RATIO) {
                        return Err(Error::ModelRegime(format!(
                            "{at}.lambdas: λ/ω_m = {l} outside [0, {}]",
                            crate::dynamics::rwa::MAX_LAMBDA_RATIO
                        )));
                    }
                }
                if space.dim() > crate::dynamics::rwa::MAX_DIM {
                    return Err(Error::ModelRegime(format!(
                        "{at}: dimension {} exceeds {}",
                        space.dim(),
                        crate::dynamics::rwa::MAX_DIM
                    )));
                }
            }
        }
        Ok(())
    }

    fn validate_measurements(&self, space: &CompositeSpace) -> Result<()> {
        let mut names = BTreeSet::new();
        let part = |label: &str, at: &str| {
            space
                .index_of(label)
                .ok_or_else(|| Error::config(at, format!("unknown part `{label}`; expected one of {NETWORK_LABELS:?}")))
        };
        let boson = |label: &str, at: &str| {
            let i = part(label, at)?;
            if ![CAVITY1, MO, CAVITY2].contains(&i) {
                return Err(Error::config(at, format!("`{label}` is not a bosonic mode")));
            }
            Ok(i)
        };
        for (k, m) in self.measurements.iter().enumerate() {
            let at = format!("measurements[{k}]");
            if !names.insert(m.name()) {
                return Err(Error::config(at, format!("duplicate measurement name `{}`", m.name())));
            }
            match m {
                Measurement::Fidelity { reference, target, .. } => {
                    boson(reference, &at)?;
                    boson(target, &at)?;
                }
                Measurement::Negativity { pair, .. } => {
                    if part(&pair[0], &at)? == part(&pair[1], &at)? {
                        return Err(Error::config(at, "negativity needs two different parts"));
                    }
                }
                Measurement::Contangle { .. } => {}
                Measurement::Quadrature { mode, phase, .. } => {
                    boson(mode, &at)?;
                    if phase.is_some_and(|p| !p.is_finite()) {
                        return Err(Error::config(at, "phase must be finite"));
                    }
                }
                Measurement::Number { mode, .. } => {
                    boson(mode, &at)?;
                }
                Measurement::Population { label, .. } => {
                    space
                        .flat_index(label)
                        .map_err(|e| Error::config(&at, e.to_string()))?;
                }
                Measurement::PartPopulation { part: p, level, .. } => {
                    let i = part(p, &at)?;
                    if *level >= space.dims()[i] {
                        return Err(Error::config(at, format!("level {level} outside `{p}`")));
                    }
                }
                Measurement::Wigner { mode, times, grid, .. } => {
                    boson(mode, &at)?;
                    grid.validate().map_err(|e| Error::config(&at, e.to_string()))?;
                    if times.iter().any(|t| !t.is_finite()) {
                        return Err(Error::config(at, "snapshot times must be finite"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("scenario serializes")
    }
}

fn check_rtol(rtol: Option<f64>, at: &str) -> Result<()> {
    match rtol {
        Some(r) if !(r > 0.0 && r < 1.0) => Err(Error::config(at, "rtol must lie in (0, 1)")),
        _ => Ok(()),
    }
}

/// The first transfer fidelity onto cavity 2, if any.
fn default_t2(measurements: &[Measurement]) -> Option<T2Config> {
    measurements.iter().find_map(|m| match m {
        Measurement::Fidelity { reference, target, .. }
            if target == NETWORK_LABELS[CAVITY2] && reference != target => Some(T2Config {
            measurement: m.name(),
            window: None,
        }),
        _ => None,
    })
}
