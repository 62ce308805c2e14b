//! Executing scenarios.

use std::time::Instant;

use log::{info, warn};
use serde::Serialize;
use serde_json::Value;

use super::config::{
    set_path, EvolutionConfig, Measurement, Overrides, RunConfig, RwaConfig, Scenario, SteadyConfig, SweepConfig,
};
use crate::dynamics::{
    evolve_density, evolve_vector, steady_state, validate_effective_hamiltonian, Diagnostics, EvolveOptions,
    TimeDependentHamiltonian, TimeGrid,
};
use crate::error::{Error, Result};
use crate::hilbert::space::{CAVITY1, CAVITY2, MO};
use crate::hilbert::{CompositeSpace, QOperator, QState, StateKind};
use crate::measures::{
    mode_fidelity, network_contangle, pair_negativity, part_population, population, quadrature_variance,
    wigner_mode, QuadratureSpec, WignerGrid, WignerSpec,
};
use crate::model::{
    assemble_initial_state, build_dissipators, build_drive_hamiltonian, build_effective_hamiltonian,
    build_squeeze_pump, build_time_dependent_a12, AssembleOptions, DissipatorSpec, ModeRecipe,
};
use crate::par::{self, Exec};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    /// Numeric column by name; text cells read as NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[k] {
                    Cell::Num(x) => *x,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct WignerSnapshot {
    pub measurement: String,
    pub mode: String,
    pub time: f64,
    pub grid: WignerGrid,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SteadyInfo {
    pub time: f64,
    pub residual: f64,
    pub trajectory: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunDiagnostics {
    /// "vector", "density", "steady_state", "sweep" or "rwa_validation".
    pub path: String,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub evaluations: usize,
    /// Largest norm or trace drift.
    pub max_drift: f64,
    pub max_asymmetry: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    pub max_hermiticity_defect: f64,
    pub warnings: Vec<String>,
    /// Approximations made while preparing the initial state.
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steady: Option<SteadyInfo>,
    /// (λ/ω_m, minimum fidelity) per validation run.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rwa_min_fidelity: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_errors: Option<usize>,
}

impl RunDiagnostics {
    fn absorb(&mut self, d: &Diagnostics, density: bool) {
        self.accepted_steps += d.stats.accepted;
        self.rejected_steps += d.stats.rejected;
        self.evaluations += d.stats.evaluations;
        self.max_drift = self.max_drift.max(d.max_drift);
        self.max_asymmetry = self.max_asymmetry.max(d.max_asymmetry);
        self.max_hermiticity_defect = self.max_hermiticity_defect.max(d.max_hermiticity_defect);
        if density && d.min_eigenvalue.is_finite() {
            let lo = self.min_eigenvalue.map_or(d.min_eigenvalue, |m| m.min(d.min_eigenvalue));
            self.min_eigenvalue = Some(lo);
        }
        self.warnings.extend(d.warnings.iter().cloned());
    }
}

#[derive(Clone, Debug)]
pub struct ResultBundle {
    pub scenario: Scenario,
    pub table: Table,
    pub wigners: Vec<WignerSnapshot>,
    pub diagnostics: RunDiagnostics,
    pub wall_seconds: f64,
}

impl ResultBundle {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.table.column(name)
    }
}

enum Probe {
    Fidelity { reference: QState, part: usize },
    Negativity(usize, usize),
    Contangle,
    Quadrature(QuadratureSpec),
    Number(usize),
    Population([usize; 5]),
    PartPopulation(usize, usize),
}

impl Probe {
    fn eval(&self, s: &QState) -> Result<f64> {
        match self {
            Probe::Fidelity { reference, part } => mode_fidelity(reference, 0, s, *part),
            Probe::Negativity(i, j) => pair_negativity(s, *i, *j),
            Probe::Contangle => Ok(network_contangle(s)?.min),
            Probe::Quadrature(q) => quadrature_variance(s, q),
            Probe::Number(p) => {
                let d = s.space().dims()[*p];
                (0..d).map(|n| Ok(n as f64 * part_population(s, *p, n)?)).sum()
            }
            Probe::Population(l) => population(s, l),
            Probe::PartPopulation(p, n) => part_population(s, *p, *n),
        }
    }
}

struct WignerProbe {
    name: String,
    mode: String,
    part: usize,
    times: Vec<f64>,
    grid: WignerSpec,
}

/// Everything derived from a scenario before integration starts.
struct Prepared {
    space: CompositeSpace,
    h: TimeDependentHamiltonian,
    dissipators: DissipatorSpec,
    initial: QState,
    notes: Vec<String>,
    probes: Vec<(String, Probe)>,
    wigners: Vec<WignerProbe>,
}

impl Prepared {
    fn new(sc: &Scenario) -> Result<Self> {
        let space = sc.space.build()?;
        let p = &sc.params;
        let hc = &sc.hamiltonian;
        let mut h = if hc.time_dependent {
            build_time_dependent_a12(p, &space)?
        } else if hc.effective {
            TimeDependentHamiltonian::constant(build_effective_hamiltonian(p, &space)?)
        } else {
            TimeDependentHamiltonian::constant(QOperator::zero(&space))
        };
        if hc.drive {
            h.static_part = h.static_part.add(&build_drive_hamiltonian(p, &space)?)?;
        }
        for &target in &hc.squeeze_pump {
            h.static_part = h.static_part.add(&build_squeeze_pump(p, &space, target)?)?;
        }
        let dissipators = if sc.dissipation.enabled {
            build_dissipators(p, &space)?
        } else {
            DissipatorSpec::default()
        };

        let init = &sc.initial_state;
        let density = sc.uses_density_path() || matches!(sc.run, RunConfig::SteadyState(_));
        let opts = AssembleOptions {
            max_tail: init.max_tail,
            vacuum_thermal_below: (!density).then_some(init.vacuum_thermal_below),
        };
        let assembled = assemble_initial_state(&init.recipes(), &space, &opts)?;
        if !density && assembled.state.kind() != StateKind::Vector {
            return Err(Error::config(
                "initial_state",
                "lossless runs need a pure initial state; raise `vacuum_thermal_below` or enable dissipation",
            ));
        }
        let initial = if density {
            assembled.state.to_density()
        } else {
            assembled.state
        };

        let part = |label: &str| space.index_of(label).expect("validated label");
        let recipe_of = |i: usize| init.recipes()[i];
        let mut probes = Vec::new();
        let mut wigners = Vec::new();
        for m in &sc.measurements {
            let probe = match m {
                Measurement::Fidelity { reference, target, .. } => {
                    let (r, t) = (part(reference), part(target));
                    Probe::Fidelity {
                        reference: reference_state(recipe_of(r), space.dims()[t], init.max_tail)?,
                        part: t,
                    }
                }
                Measurement::Negativity { pair, .. } => Probe::Negativity(part(&pair[0]), part(&pair[1])),
                Measurement::Contangle { .. } => Probe::Contangle,
                Measurement::Quadrature {
                    mode, phase, quadrature, ..
                } => {
                    let i = part(mode);
                    let default = match i {
                        CAVITY1 => p.phi.c1,
                        MO => p.phi.m,
                        CAVITY2 => p.phi.c2,
                        _ => 0.0,
                    };
                    Probe::Quadrature(QuadratureSpec {
                        mode: i,
                        phase: phase.unwrap_or(default),
                        quadrature: *quadrature,
                    })
                }
                Measurement::Number { mode, .. } => Probe::Number(part(mode)),
                Measurement::Population { label, .. } => Probe::Population(*label),
                Measurement::PartPopulation { part: pl, level, .. } => Probe::PartPopulation(part(pl), *level),
                Measurement::Wigner { mode, times, grid, .. } => {
                    wigners.push(WignerProbe {
                        name: m.name(),
                        mode: mode.clone(),
                        part: part(mode),
                        times: times.clone(),
                        grid: *grid,
                    });
                    continue;
                }
            };
            probes.push((m.name(), probe));
        }
        Ok(Prepared {
            space,
            h,
            dissipators,
            initial,
            notes: assembled.notes,
            probes,
            wigners,
        })
    }

    fn eval(&self, s: &QState) -> Result<Vec<f64>> {
        self.probes.iter().map(|(_, p)| p.eval(s)).collect()
    }

    fn columns(&self, first: &str) -> Vec<String> {
        std::iter::once(first.to_string())
            .chain(self.probes.iter().map(|(n, _)| n.clone()))
            .collect()
    }
}

/// Single-mode reference state for fidelities, built at the target's truncation.
fn reference_state(recipe: ModeRecipe, truncation: usize, max_tail: f64) -> Result<QState> {
    let space = CompositeSpace::single_boson(truncation)?;
    let opts = AssembleOptions {
        max_tail,
        vacuum_thermal_below: None,
    };
    Ok(assemble_initial_state(&[recipe], &space, &opts)?.state)
}

/// Sample indices nearest to each requested time; the last sample if none.
fn snapshot_indices(times: &[f64], requested: &[f64]) -> Vec<usize> {
    if requested.is_empty() {
        return vec![times.len() - 1];
    }
    let mut idx: Vec<usize> = requested
        .iter()
        .map(|&t| {
            (0..times.len())
                .min_by(|&a, &b| (times[a] - t).abs().total_cmp(&(times[b] - t).abs()))
                .unwrap_or(0)
        })
        .collect();
    idx.dedup();
    idx
}

/// Index of the largest value with time inside `window`.
pub fn argmax_in(times: &[f64], values: &[f64], window: Option<[f64; 2]>) -> Option<usize> {
    let [a, b] = window.unwrap_or([f64::NEG_INFINITY, f64::INFINITY]);
    (0..times.len())
        .filter(|&k| times[k] >= a && times[k] <= b)
        .max_by(|&i, &j| values[i].total_cmp(&values[j]))
}

struct Outcome {
    table: Table,
    wigners: Vec<WignerSnapshot>,
    diagnostics: RunDiagnostics,
}

fn run_evolution(sc: &Scenario, e: &EvolutionConfig, exec: Exec) -> Result<Outcome> {
    let prep = Prepared::new(sc)?;
    let grid = e.grid();
    let times = grid.times();
    let density = sc.uses_density_path();
    let mut opts = if density {
        EvolveOptions::density()
    } else {
        EvolveOptions::vector()
    };
    if let Some(r) = e.rtol {
        opts.rtol = r;
        opts.atol = r * 1e-2;
    }
    opts.exec = exec;

    let shots: Vec<Vec<usize>> = prep.wigners.iter().map(|w| snapshot_indices(&times, &w.times)).collect();
    let mut snapshots = Vec::new();
    let mut observer = |k: usize, t: f64, s: &QState| -> Result<Vec<(String, f64)>> {
        for (w, idx) in prep.wigners.iter().zip(&shots) {
            if idx.contains(&k) {
                snapshots.push(WignerSnapshot {
                    measurement: w.name.clone(),
                    mode: w.mode.clone(),
                    time: t,
                    grid: wigner_mode(s, w.part, &w.grid, exec)?,
                });
            }
        }
        let vals = prep.eval(s)?;
        Ok(prep.probes.iter().map(|(n, _)| n.clone()).zip(vals).collect())
    };
    info!(
        "{}: {} evolution, dim {}, {} samples",
        sc.name,
        if density { "density" } else { "vector" },
        prep.space.dim(),
        times.len()
    );
    let result = if density {
        evolve_density(&prep.h.static_part, &prep.dissipators, &prep.initial, &grid, &opts, &mut observer)?
    } else {
        evolve_vector(&prep.h, &prep.initial, &grid, &opts, &mut observer)?
    };

    let mut diag = RunDiagnostics {
        path: if density { "density" } else { "vector" }.into(),
        notes: prep.notes.clone(),
        ..Default::default()
    };
    diag.absorb(&result.diagnostics, density);
    if let Some(t2) = &e.t2 {
        if let Some(series) = result.observable(&t2.measurement) {
            diag.t2 = argmax_in(&result.times, series, t2.window).map(|k| result.times[k]);
        }
    }
    let mut table = Table {
        columns: prep.columns("t"),
        rows: Vec::with_capacity(result.times.len()),
    };
    for (k, &t) in result.times.iter().enumerate() {
        let mut row = vec![Cell::Num(t)];
        row.extend(result.observables.iter().map(|(_, v)| Cell::Num(v[k])));
        table.rows.push(row);
    }
    Ok(Outcome {
        table,
        wigners: snapshots,
        diagnostics: diag,
    })
}

fn run_steady(sc: &Scenario, s: &SteadyConfig, exec: Exec) -> Result<Outcome> {
    let prep = Prepared::new(sc)?;
    info!("{}: steady state, dim {}", sc.name, prep.space.dim());
    let mut obs = |st: &QState| prep.eval(st);
    let ss = steady_state(&prep.h.static_part, &prep.dissipators, &prep.initial, &s.criteria, exec, &mut obs)?;
    let mut diag = RunDiagnostics {
        path: "steady_state".into(),
        notes: prep.notes.clone(),
        steady: Some(SteadyInfo {
            time: ss.time,
            residual: ss.residual,
            trajectory: ss.trajectory.clone(),
        }),
        ..Default::default()
    };
    diag.absorb(&ss.diagnostics, true);
    let mut row = vec![Cell::Num(ss.time)];
    row.extend(ss.observables.iter().map(|&v| Cell::Num(v)));
    let wigners = prep
        .wigners
        .iter()
        .map(|w| {
            Ok(WignerSnapshot {
                measurement: w.name.clone(),
                mode: w.mode.clone(),
                time: ss.time,
                grid: wigner_mode(&ss.state, w.part, &w.grid, exec)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Outcome {
        table: Table {
            columns: prep.columns("t"),
            rows: vec![row],
        },
        wigners,
        diagnostics: diag,
    })
}

fn run_rwa(sc: &Scenario, r: &RwaConfig, exec: Exec) -> Result<Outcome> {
    let grid = TimeGrid::new(0.0, r.t1, r.samples)?;
    let mut opts = EvolveOptions::with_rtol(r.rtol.unwrap_or(1e-8));
    opts.exec = exec;
    let mut columns = vec!["t".to_string()];
    let mut series = Vec::new();
    let mut diag = RunDiagnostics {
        path: "rwa_validation".into(),
        ..Default::default()
    };
    for &lambda in &r.lambdas {
        let mut point = sc.clone();
        point.params.lambda = lambda * sc.params.omega_m;
        point.run = RunConfig::default();
        let prep = Prepared::new(&point)?;
        diag.notes.extend(prep.notes.iter().cloned());
        let rep = validate_effective_hamiltonian(&point.params, &prep.space, &prep.initial, &grid, &opts)?;
        info!("{}: λ/ω_m = {lambda}, min fidelity {:.6}", sc.name, rep.min_fidelity);
        diag.rwa_min_fidelity.push((lambda, rep.min_fidelity));
        columns.push(format!("F_rwa_{lambda}"));
        series.push(rep.fidelity);
    }
    let rows = grid
        .times()
        .iter()
        .enumerate()
        .map(|(k, &t)| std::iter::once(Cell::Num(t)).chain(series.iter().map(|s| Cell::Num(s[k]))).collect())
        .collect();
    Ok(Outcome {
        table: Table { columns, rows },
        wigners: Vec::new(),
        diagnostics: diag,
    })
}

/// Cartesian product of axis value indices.
fn grid_points(axes: &[usize]) -> Vec<Vec<usize>> {
    axes.iter().fold(vec![Vec::new()], |acc, &n| {
        acc.iter()
            .flat_map(|p| {
                (0..n).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect()
    })
}

fn sweep_point(base: &Value, s: &SweepConfig, point: &[usize], exec: Exec) -> Result<(Outcome, Scenario)> {
    let mut v = base.clone();
    set_path(&mut v, "run", serde_json::to_value(s.inner.as_ref()).expect("run serializes"))?;
    for (ax, &i) in s.axes.iter().zip(point) {
        for (path, mult) in &ax.targets {
            set_path(&mut v, path, Value::from(mult * ax.values[i]))?;
        }
    }
    let sc = Scenario::from_value(v, &Overrides::default())?;
    let out = match &sc.run {
        RunConfig::TimeEvolution(e) => run_evolution(&sc, e, exec)?,
        RunConfig::SteadyState(st) => run_steady(&sc, st, exec)?,
        _ => unreachable!("validated inner run"),
    };
    Ok((out, sc))
}

fn run_sweep(sc: &Scenario, s: &SweepConfig, exec: Exec) -> Result<Outcome> {
    let base = sc.to_json();
    let points = if s.zip {
        (0..s.axes[0].values.len()).map(|k| vec![k; s.axes.len()]).collect()
    } else {
        grid_points(&s.axes.iter().map(|a| a.values.len()).collect::<Vec<_>>())
    };
    let names: Vec<String> = sc.measurements.iter().filter(|m| m.is_scalar()).map(|m| m.name()).collect();
    let results = par::map(exec, &points, |p| sweep_point(&base, s, p, exec));

    let mut columns = vec!["point".to_string()];
    columns.extend(s.axes.iter().map(|a| a.name.clone()));
    columns.extend(["measurement", "t", "value", "error"].map(String::from));
    let mut rows = Vec::new();
    let mut diag = RunDiagnostics {
        path: "sweep".into(),
        sweep_points: Some(points.len()),
        ..Default::default()
    };
    let mut errors = 0;
    for (k, (p, res)) in points.iter().zip(results).enumerate() {
        let mut head = vec![Cell::Num(k as f64)];
        head.extend(s.axes.iter().zip(p).map(|(a, &i)| Cell::Num(a.values[i])));
        match res {
            Ok((out, point_sc)) => {
                let d = &out.diagnostics;
                diag.accepted_steps += d.accepted_steps;
                diag.rejected_steps += d.rejected_steps;
                diag.evaluations += d.evaluations;
                diag.max_drift = diag.max_drift.max(d.max_drift);
                diag.max_asymmetry = diag.max_asymmetry.max(d.max_asymmetry);
                diag.max_hermiticity_defect = diag.max_hermiticity_defect.max(d.max_hermiticity_defect);
                if let Some(lo) = d.min_eigenvalue {
                    diag.min_eigenvalue = Some(diag.min_eigenvalue.map_or(lo, |m| m.min(lo)));
                }
                diag.warnings.extend(d.warnings.iter().map(|w| format!("point {k}: {w}")));
                diag.notes.extend(d.notes.iter().map(|w| format!("point {k}: {w}")));
                let times = out.table.column("t").unwrap_or_default();
                let at = match &point_sc.run {
                    RunConfig::TimeEvolution(_) => d
                        .t2
                        .and_then(|t2| times.iter().position(|&t| t == t2))
                        .unwrap_or(times.len() - 1),
                    _ => 0,
                };
                for name in &names {
                    let v = out.table.column(name).map_or(f64::NAN, |c| c[at]);
                    let mut row = head.clone();
                    row.extend([
                        Cell::Text(name.clone()),
                        Cell::Num(times[at]),
                        Cell::Num(v),
                        Cell::Text(String::new()),
                    ]);
                    rows.push(row);
                }
            }
            Err(e) => {
                errors += 1;
                warn!("{}: sweep point {k} failed: {e}", sc.name);
                let mut row = head;
                row.extend([
                    Cell::Text(String::new()),
                    Cell::Num(f64::NAN),
                    Cell::Num(f64::NAN),
                    Cell::Text(e.to_string()),
                ]);
                rows.push(row);
            }
        }
    }
    diag.sweep_errors = Some(errors);
    Ok(Outcome {
        table: Table { columns, rows },
        wigners: Vec::new(),
        diagnostics: diag,
    })
}

/// Execute a validated scenario.
pub fn run(sc: &Scenario) -> Result<ResultBundle> {
    run_with(sc, Exec::default())
}

pub fn run_with(sc: &Scenario, exec: Exec) -> Result<ResultBundle> {
    let start = Instant::now();
    let out = match &sc.run {
        RunConfig::TimeEvolution(e) => run_evolution(sc, e, exec),
        RunConfig::SteadyState(s) => run_steady(sc, s, exec),
        RunConfig::Sweep(s) => run_sweep(sc, s, exec),
        RunConfig::RwaValidation(r) => run_rwa(sc, r, exec),
    }
    .map_err(|e| e.in_scenario(&sc.name))?;
    Ok(ResultBundle {
        scenario: sc.clone(),
        table: out.table,
        wigners: out.wigners,
        diagnostics: out.diagnostics,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
