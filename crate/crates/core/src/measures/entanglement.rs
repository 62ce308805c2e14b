use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::linalg::eig_hermitian_values;
use crate::hilbert::space::{CAVITY1, CAVITY2, MO};
use crate::hilbert::{partial_trace, partial_transpose, QState};

/// Σ (|ζ| − ζ)/2 over the spectrum of ρ^{T_part} for a two-part state.
pub fn negativity(rho: &QState, part: usize) -> Result<f64> {
    if rho.space().len() != 2 {
        return Err(Error::SpaceShape(format!(
            "negativity needs two parts, got {}",
            rho.space().len()
        )));
    }
    let pt = partial_transpose(&rho.to_density(), part)?;
    let vals = eig_hermitian_values(&pt)?;
    Ok(vals.iter().map(|z| (z.abs() - z) / 2.0).sum())
}

/// Negativity of the reduced state of parts `i` and `j`.
pub fn pair_negativity(state: &QState, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(Error::InvalidArgument(format!("negativity of part {i} with itself")));
    }
    negativity(&partial_trace(state, &[i, j])?, 0)
}

/// (log₂ ‖ρ^{T_part}‖₁)².
fn log_contangle(rho: &QState, part: usize) -> Result<f64> {
    let pt = partial_transpose(rho, part)?;
    let norm: f64 = eig_hermitian_values(&pt)?.iter().map(|z| z.abs()).sum();
    Ok(norm.log2().powi(2))
}

#[derive(Clone, Debug, Serialize)]
pub struct RootResidual {
    pub root: usize,
    pub label: String,
    /// E^{A|(BC)}.
    pub whole: f64,
    /// E^{A|B} and E^{A|C}, B before C in part order.
    pub pairs: [f64; 2],
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContangleReport {
    pub roots: Vec<RootResidual>,
    pub min: f64,
}

/// Minimum residual contangle over the three choices of root of a
/// three-part state. Small negative values are reported as computed.
pub fn contangle(rho: &QState) -> Result<ContangleReport> {
    let space = rho.space();
    if space.len() != 3 {
        return Err(Error::SpaceShape(format!(
            "residual contangle needs three parts, got {}",
            space.len()
        )));
    }
    let rho = rho.to_density();
    let mut roots = Vec::with_capacity(3);
    for a in 0..3 {
        let whole = log_contangle(&rho, a)?;
        let mut pairs = [0.0; 2];
        for (slot, other) in (0..3).filter(|&k| k != a).enumerate() {
            let pair = partial_trace(&rho, &[a, other])?;
            let root = if a < other { 0 } else { 1 };
            pairs[slot] = log_contangle(&pair, root)?;
        }
        roots.push(RootResidual {
            root: a,
            label: space.parts()[a].label.clone(),
            whole,
            pairs,
            residual: whole - pairs[0] - pairs[1],
        });
    }
    let min = roots.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    Ok(ContangleReport { roots, min })
}

/// Residual contangle of the bosonic modes of the network, atoms traced out.
pub fn network_contangle(state: &QState) -> Result<ContangleReport> {
    if !state.space().is_network() {
        return Err(Error::SpaceShape("network contangle needs the network space".into()));
    }
    contangle(&partial_trace(state, &[CAVITY1, MO, CAVITY2])?)
}
