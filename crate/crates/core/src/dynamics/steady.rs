//! Lindblad fixed points by long-time marching.

use log::{debug, info};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::evolve::{inspect_snapshot, symmetrize, trace, Diagnostics, DRIFT_ERROR};
use super::integrator::{Dopri5, IntegratorOptions};
use super::liouvillian::{ApplyPath, Liouvillian};
use crate::error::{Error, Result};
use crate::hilbert::{QOperator, QState};
use crate::model::DissipatorSpec;
use crate::par::Exec;

const MIN_RTOL: f64 = 1e-12;

/// Stopping rule for [`steady_state`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SteadyCriteria {
    /// Bound on max |L(ρ)|.
    pub residual_tol: f64,
    /// Bound on the change of every observable over the trailing window.
    pub observable_tol: f64,
    /// Trailing window length. `None` means 50/Γ_min.
    pub window: Option<f64>,
    /// Spacing of convergence checks. `None` means window/5.
    pub check_every: Option<f64>,
    pub max_time: f64,
    pub rtol: f64,
}

impl Default for SteadyCriteria {
    fn default() -> Self {
        SteadyCriteria {
            residual_tol: 1e-8,
            observable_tol: 1e-6,
            window: None,
            check_every: None,
            max_time: 5000.0,
            rtol: 1e-7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub state: QState,
    /// max |L(ρ)| of the returned state.
    pub residual: f64,
    /// Marching time needed.
    pub time: f64,
    /// (time, residual) at every check.
    pub trajectory: Vec<(f64, f64)>,
    /// Observable values of the returned state.
    pub observables: Vec<f64>,
    pub diagnostics: Diagnostics,
}

/// March `rho_guess` forward until the generator residual and all
/// `observables(ρ)` have settled.
pub fn steady_state(
    h: &QOperator,
    dissipators: &DissipatorSpec,
    rho_guess: &QState,
    criteria: &SteadyCriteria,
    exec: Exec,
    observables: &mut dyn FnMut(&QState) -> Result<Vec<f64>>,
) -> Result<SteadyState> {
    let gamma_min = dissipators
        .min_rate()
        .ok_or_else(|| Error::IllPosed("steady state requested without any dissipative channel".into()))?;
    if rho_guess.space() != h.space() {
        return Err(Error::SpaceMismatch("initial guess and Hamiltonian spaces differ".into()));
    }
    let guess = rho_guess.to_density();
    let window = criteria.window.unwrap_or(50.0 / gamma_min);
    let check = criteria.check_every.unwrap_or(window / 5.0);
    if !(window > 0.0 && check > 0.0 && criteria.max_time > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "steady-state window {window} and check spacing {check} must be positive"
        )));
    }

    let lv = Liouvillian::new(h, dissipators, exec)?;
    let d = lv.dim();
    let space = guess.space().clone();
    let mut y: Vec<C64> = guess.as_density().expect("density").as_slice().to_vec();
    let tr0 = trace(d, &y);
    let mut rhs = |_t: f64, x: &[C64], dx: &mut [C64]| lv.apply_into(x, dx, ApplyPath::Hermitian);
    let stepper_at = |t: f64, rtol: f64| {
        let iopts = IntegratorOptions {
            exec,
            ..IntegratorOptions::with_rtol(rtol)
        };
        Dopri5::new(d * d, t, iopts)
    };
    let mut rtol = criteria.rtol;
    let mut stepper = stepper_at(0.0, rtol);
    let mut evaluations = 0;
    let mut diag = Diagnostics {
        min_eigenvalue: f64::INFINITY,
        ..Default::default()
    };
    let mut scratch = vec![C64::new(0.0, 0.0); d * d];
    let mut history: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut trajectory = Vec::new();
    let mut t = 0.0;
    info!("steady state: dim {d}, window {window}, checks every {check}");
    loop {
        let to = (t + check).min(criteria.max_time);
        let mut max_asym = diag.max_asymmetry;
        let mut max_drift = diag.max_drift;
        stepper.advance(&mut rhs, &mut y, to, &mut |ts, ys: &mut [C64]| {
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
        diag.max_asymmetry = max_asym;
        diag.max_drift = max_drift;
        t = to;

        lv.apply_into(&y, &mut scratch, ApplyPath::General);
        let residual = scratch.iter().map(|z| z.norm()).fold(0.0, f64::max);
        trajectory.push((t, residual));
        let state = QState::density_unchecked(&space, DMatrix::from_column_slice(d, d, &y))?;
        let obs = observables(&state)?;
        let settled = t >= window
            && history
                .iter()
                .filter(|(th, _)| *th >= t - window - 1e-9)
                .all(|(_, o)| o.iter().zip(&obs).all(|(a, b)| (a - b).abs() < criteria.observable_tol));
        debug!(
            "t = {t:.2}: residual {residual:.3e}, settled {settled}, {} steps",
            stepper.stats.accepted
        );
        // Step-error noise puts a floor under the residual; lower it when the
        // march stops making progress.
        let stalled = trajectory.len() >= 2 && residual > 0.9 * trajectory[trajectory.len() - 2].1;
        if residual >= criteria.residual_tol && stalled && rtol > MIN_RTOL {
            rtol = (rtol / 10.0).max(MIN_RTOL);
            debug!("residual stalled at {residual:.3e}; rtol -> {rtol:.0e}");
            evaluations += stepper.stats.evaluations;
            stepper = stepper_at(t, rtol);
        }
        history.push((t, obs.clone()));
        if residual < criteria.residual_tol && settled {
            diag.stats = stepper.stats;
            diag.stats.evaluations += evaluations;
            inspect_snapshot(&state, t, true, &mut diag)?;
            return Ok(SteadyState {
                state,
                residual,
                time: t,
                trajectory,
                observables: obs,
                diagnostics: diag,
            });
        }
        if t >= criteria.max_time {
            return Err(Error::Convergence {
                time: t,
                residual,
                trajectory,
            });
        }
    }
}
