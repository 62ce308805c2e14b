//! Figures of merit evaluated on simulated states.

pub mod entanglement;
pub mod fidelity;
pub mod population;
pub mod quadrature;
pub mod wigner;

pub use entanglement::{contangle, negativity, network_contangle, pair_negativity, ContangleReport, RootResidual};
pub use fidelity::{fidelity, mode_fidelity, FIDELITY_CLAMP};
pub use population::{part_population, population};
pub use quadrature::{quadrature_variance, Quadrature, QuadratureSpec};
pub use wigner::{wigner, wigner_mode, WignerGrid, WignerSpec};

use crate::error::{Error, Result};
use crate::hilbert::{partial_trace, QState};

/// Reduced state of one part; single-part states pass through unchanged.
pub(crate) fn reduce_to(state: &QState, part: usize) -> Result<QState> {
    let n = state.space().len();
    if part >= n {
        return Err(Error::InvalidIndex(format!("part {part} outside {n} parts")));
    }
    if n == 1 {
        return Ok(state.clone());
    }
    partial_trace(state, &[part])
}
