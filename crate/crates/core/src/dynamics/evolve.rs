//! Schrödinger and Lindblad time evolution on a sample grid.

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::grid::TimeGrid;
use super::integrator::{Dopri5, IntegratorOptions, StepStats};
use super::liouvillian::{ApplyPath, Liouvillian};
use crate::error::{Error, Result};
use crate::hilbert::{QOperator, QState, SparseMatrix};
use crate::model::{DissipatorSpec, TimeDependentHamiltonian};
use crate::par::{self, Exec};

/// Norm or trace drift that aborts a run.
pub const DRIFT_ERROR: f64 = 1e-5;
/// Drift above this is reported as a warning.
pub const DRIFT_WARN: f64 = 1e-7;
/// Snapshot eigenvalue below this is reported as positivity loss.
pub const POSITIVITY_WARN: f64 = -1e-5;

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub exec: Exec,
    /// Keep every k-th sample state in the result.
    pub keep_every: Option<usize>,
    /// Compute the lowest eigenvalue of every density snapshot.
    pub check_positivity: bool,
}

impl EvolveOptions {
    pub fn vector() -> Self {
        Self::with_rtol(1e-8)
    }

    pub fn density() -> Self {
        Self::with_rtol(1e-7)
    }

    pub fn with_rtol(rtol: f64) -> Self {
        EvolveOptions {
            rtol,
            atol: rtol * 1e-2,
            exec: Exec::default(),
            keep_every: None,
            check_positivity: true,
        }
    }

    pub fn keep_all(mut self) -> Self {
        self.keep_every = Some(1);
        self
    }

    fn integrator(&self) -> IntegratorOptions {
        IntegratorOptions {
            atol: self.atol,
            exec: self.exec,
            ..IntegratorOptions::with_rtol(self.rtol)
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub stats: StepStats,
    /// Largest |‖ψ‖ − 1| or |Tr ρ − 1| seen after any step.
    pub max_drift: f64,
    /// Largest max-norm of ρ − ρ† removed by symmetrization.
    pub max_asymmetry: f64,
    /// Lowest snapshot eigenvalue (1 for vector runs).
    pub min_eigenvalue: f64,
    pub max_hermiticity_defect: f64,
    pub warnings: Vec<String>,
}

/// Sample times, optional snapshots and named observable series.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    /// (sample index, state) for the kept snapshots.
    pub states: Vec<(usize, QState)>,
    pub observables: Vec<(String, Vec<f64>)>,
    pub diagnostics: Diagnostics,
}

impl EvolutionResult {
    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn final_state(&self) -> Option<&QState> {
        self.states.last().map(|(_, s)| s)
    }
}

/// Called at every sample with (index, time, state); returns named values.
pub type Observer<'a> = dyn FnMut(usize, f64, &QState) -> Result<Vec<(String, f64)>> + 'a;

/// Observer that records nothing.
pub fn no_observables(_: usize, _: f64, _: &QState) -> Result<Vec<(String, f64)>> {
    Ok(Vec::new())
}

fn record(series: &mut Vec<(String, Vec<f64>)>, values: Vec<(String, f64)>) -> Result<()> {
    if series.is_empty() {
        series.extend(values.into_iter().map(|(n, v)| (n, vec![v])));
        return Ok(());
    }
    if values.len() != series.len() {
        return Err(Error::InvalidArgument("observer changed its output set".into()));
    }
    for ((name, vs), (n, v)) in series.iter_mut().zip(values) {
        if *name != n {
            return Err(Error::InvalidArgument(format!("observer renamed `{name}` to `{n}`")));
        }
        vs.push(v);
    }
    Ok(())
}

fn spmv_add(exec: Exec, m: &SparseMatrix, alpha: C64, x: &[C64], y: &mut [C64]) {
    const ROWS: usize = 512;
    par::for_each_chunk_mut(exec, y, ROWS, |ci, out| {
        let off = ci * ROWS;
        for (r, o) in out.iter_mut().enumerate() {
            let (cols, vals) = m.row(off + r);
            let mut s = C64::new(0.0, 0.0);
            for (&j, &v) in cols.iter().zip(vals) {
                s += v * x[j];
            }
            *o += alpha * s;
        }
    });
}

/// Solve dψ/dt = −i H(t) ψ. The norm is never renormalized; its drift is the
/// accuracy signal.
pub fn evolve_vector(
    h: &TimeDependentHamiltonian,
    psi0: &QState,
    grid: &TimeGrid,
    opts: &EvolveOptions,
    observer: &mut Observer<'_>,
) -> Result<EvolutionResult> {
    grid.validate()?;
    if psi0.space() != h.space() {
        return Err(Error::SpaceMismatch("initial state and Hamiltonian spaces differ".into()));
    }
    let mut y: Vec<C64> = psi0
        .as_vector()
        .ok_or_else(|| Error::WrongKind("vector evolution needs a state vector".into()))?
        .as_slice()
        .to_vec();
    let space = psi0.space().clone();
    let h0 = h.static_part.matrix().clone();
    let terms: Vec<(SparseMatrix, SparseMatrix, f64)> = h
        .oscillating
        .iter()
        .map(|(a, w)| (a.matrix().clone(), a.matrix().adjoint(), *w))
        .collect();
    let exec = opts.exec;
    let mut rhs = |t: f64, x: &[C64], dx: &mut [C64]| {
        dx.fill(C64::new(0.0, 0.0));
        let mi = C64::new(0.0, -1.0);
        spmv_add(exec, &h0, mi, x, dx);
        for (a, ad, w) in &terms {
            let ph = C64::from_polar(1.0, w * t);
            spmv_add(exec, a, mi * ph, x, dx);
            spmv_add(exec, ad, mi * ph.conj(), x, dx);
        }
    };

    let norm0 = (y.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt();
    let mut diag = Diagnostics {
        min_eigenvalue: 1.0,
        ..Default::default()
    };
    let mut stepper = Dopri5::new(y.len(), grid.t0, opts.integrator());
    let times = grid.times();
    let mut states = Vec::new();
    let mut series = Vec::new();
    let rtol = opts.rtol;
    for (k, &t) in times.iter().enumerate() {
        let mut max_drift = diag.max_drift;
        stepper.advance(&mut rhs, &mut y, t, &mut |ts, ys: &mut [C64]| {
            let n = ys.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let drift = (n - norm0).abs();
            max_drift = max_drift.max(drift);
            if drift > DRIFT_ERROR {
                return Err(Error::IntegratorAccuracy {
                    what: "norm",
                    drift,
                    time: ts,
                    suggested_rtol: rtol / 10.0,
                });
            }
            Ok(false)
        })?;
        diag.max_drift = max_drift;
        let state = QState::vector_unchecked(&space, DVector::from_column_slice(&y))?;
        record(&mut series, observer(k, t, &state)?)?;
        if opts.keep_every.is_some_and(|e| k % e.max(1) == 0 || k + 1 == times.len()) {
            states.push((k, state));
        }
    }
    diag.stats = stepper.stats;
    if diag.max_drift > DRIFT_WARN {
        let msg = format!("norm drift {:.3e} exceeds {DRIFT_WARN:.0e}", diag.max_drift);
        warn!("{msg}");
        diag.warnings.push(msg);
    }
    debug!("vector evolution: {:?}", diag.stats);
    Ok(EvolutionResult {
        times,
        states,
        observables: series,
        diagnostics: diag,
    })
}

/// Max-norm of ρ − ρ† and in-place symmetrization ρ ← (ρ + ρ†)/2.
pub(crate) fn symmetrize(d: usize, rho: &mut [C64]) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..d {
        for i in 0..j {
            let (a, b) = (rho[j * d + i], rho[i * d + j]);
            let diff = a - b.conj();
            worst = worst.max(diff.norm());
            let avg = (a + b.conj()) * 0.5;
            rho[j * d + i] = avg;
            rho[i * d + j] = avg.conj();
        }
        let z = &mut rho[j * d + j];
        worst = worst.max(2.0 * z.im.abs());
        z.im = 0.0;
    }
    worst
}

pub(crate) fn trace(d: usize, rho: &[C64]) -> C64 {
    (0..d).map(|i| rho[i * d + i]).sum()
}

/// Snapshot checks shared by time evolution and steady state.
pub(crate) fn inspect_snapshot(state: &QState, t: f64, positivity: bool, diag: &mut Diagnostics) -> Result<()> {
    let m = state.as_density().expect("density snapshot");
    let herm = crate::hilbert::linalg::hermiticity_defect(m);
    diag.max_hermiticity_defect = diag.max_hermiticity_defect.max(herm);
    if positivity {
        let lo = crate::hilbert::linalg::min_eigenvalue(m)?;
        diag.min_eigenvalue = diag.min_eigenvalue.min(lo);
        if lo < POSITIVITY_WARN {
            let msg = format!("positivity loss at t = {t}: eigenvalue {lo:.3e}");
            warn!("{msg}");
            diag.warnings.push(msg);
        }
    }
    Ok(())
}

/// Integrate the Lindblad equation with symmetrization after every step.
pub fn evolve_density(
    h: &QOperator,
    dissipators: &DissipatorSpec,
    rho0: &QState,
    grid: &TimeGrid,
    opts: &EvolveOptions,
    observer: &mut Observer<'_>,
) -> Result<EvolutionResult> {
    grid.validate()?;
    if rho0.space() != h.space() {
        return Err(Error::SpaceMismatch("initial state and Hamiltonian spaces differ".into()));
    }
    let rho0m = rho0
        .as_density()
        .ok_or_else(|| Error::WrongKind("density evolution needs a density matrix".into()))?;
    let lv = Liouvillian::new(h, dissipators, opts.exec)?;
    let d = lv.dim();
    let space = rho0.space().clone();
    let mut y: Vec<C64> = rho0m.as_slice().to_vec();
    let tr0 = trace(d, &y);
    let mut rhs = |_t: f64, x: &[C64], dx: &mut [C64]| lv.apply_into(x, dx, ApplyPath::Hermitian);

    let mut diag = Diagnostics {
        min_eigenvalue: f64::INFINITY,
        ..Default::default()
    };
    let mut stepper = Dopri5::new(y.len(), grid.t0, opts.integrator());
    let times = grid.times();
    let mut states = Vec::new();
    let mut series = Vec::new();
    let rtol = opts.rtol;
    for (k, &t) in times.iter().enumerate() {
        let (mut max_drift, mut max_asym) = (diag.max_drift, diag.max_asymmetry);
        stepper.advance(&mut rhs, &mut y, t, &mut |ts, ys: &mut [C64]| {
            let asym = symmetrize(d, ys);
            max_asym = max_asym.max(asym);
            let drift = (trace(d, ys) - tr0).norm();
            max_drift = max_drift.max(drift);
            if drift > DRIFT_ERROR {
                return Err(Error::IntegratorAccuracy {
                    what: "trace",
                    drift,
                    time: ts,
                    suggested_rtol: rtol / 10.0,
                });
            }
            Ok(asym > 0.0)
        })?;
        diag.max_drift = max_drift;
        diag.max_asymmetry = max_asym;
        let state = QState::density_unchecked(&space, DMatrix::from_column_slice(d, d, &y))?;
        inspect_snapshot(&state, t, opts.check_positivity, &mut diag)?;
        record(&mut series, observer(k, t, &state)?)?;
        if opts.keep_every.is_some_and(|e| k % e.max(1) == 0 || k + 1 == times.len()) {
            states.push((k, state));
        }
    }
    diag.stats = stepper.stats;
    if diag.max_drift > DRIFT_WARN {
        let msg = format!("trace drift {:.3e} exceeds {DRIFT_WARN:.0e}", diag.max_drift);
        warn!("{msg}");
        diag.warnings.push(msg);
    }
    debug!(
        "density evolution: {:?}, max asymmetry {:.3e}",
        diag.stats, diag.max_asymmetry
    );
    Ok(EvolutionResult {
        times,
        states,
        observables: series,
        diagnostics: diag,
    })
}
