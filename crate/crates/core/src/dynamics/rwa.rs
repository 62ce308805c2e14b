//! Comparison of the rotating-frame interaction with its static part.

use serde::Serialize;

use super::evolve::{evolve_vector, no_observables, EvolveOptions};
use super::grid::TimeGrid;
use crate::error::{Error, Result};
use crate::hilbert::{CompositeSpace, QState};
use crate::model::{build_drive_hamiltonian, build_time_dependent_a12, SystemParams, TimeDependentHamiltonian};

/// Largest λ/ω_m accepted by [`validate_effective_hamiltonian`].
pub const MAX_LAMBDA_RATIO: f64 = 0.05;
/// Largest product dimension accepted by [`validate_effective_hamiltonian`].
pub const MAX_DIM: usize = 2000;

#[derive(Clone, Debug, Serialize)]
pub struct RwaReport {
    pub times: Vec<f64>,
    /// |⟨ψ_full(t)|ψ_eff(t)⟩| per sample.
    pub fidelity: Vec<f64>,
    pub min_fidelity: f64,
}

/// Evolve `psi0` under the oscillating interaction and under the static
/// effective Hamiltonian, and report their overlap. Atomic drives in `p` are
/// added to both.
pub fn validate_effective_hamiltonian(
    p: &SystemParams,
    space: &CompositeSpace,
    psi0: &QState,
    grid: &TimeGrid,
    opts: &EvolveOptions,
) -> Result<RwaReport> {
    let ratio = p.lambda / p.omega_m;
    if !(ratio.abs() <= MAX_LAMBDA_RATIO) {
        return Err(Error::ModelRegime(format!(
            "λ/ω_m = {ratio} exceeds {MAX_LAMBDA_RATIO}"
        )));
    }
    if space.dim() > MAX_DIM {
        return Err(Error::ModelRegime(format!(
            "validation dimension {} exceeds {MAX_DIM}; reduce truncations",
            space.dim()
        )));
    }
    let mut full = build_time_dependent_a12(p, space)?;
    let drive = build_drive_hamiltonian(p, space)?;
    if !drive.is_zero() {
        full.static_part = full.static_part.add(&drive)?;
    }
    let eff = TimeDependentHamiltonian::constant(full.static_part.clone());
    let opts = opts.keep_all();
    let a = evolve_vector(&full, psi0, grid, &opts, &mut no_observables)?;
    let b = evolve_vector(&eff, psi0, grid, &opts, &mut no_observables)?;
    let fidelity: Vec<f64> = a
        .states
        .iter()
        .zip(&b.states)
        .map(|((_, x), (_, y))| {
            let (x, y) = (x.as_vector().expect("vector"), y.as_vector().expect("vector"));
            x.dotc(y).norm() / (x.norm() * y.norm())
        })
        .collect();
    let min_fidelity = fidelity.iter().copied().fold(1.0, f64::min);
    Ok(RwaReport {
        times: a.times,
        fidelity,
        min_fidelity,
    })
}
