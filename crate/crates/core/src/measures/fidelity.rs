use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::reduce_to;
use crate::error::{Error, Result};
use crate::hilbert::linalg::sqrtm_psd;
use crate::hilbert::{QState, StateData};

/// State eigenvalues in `[-FIDELITY_CLAMP, 0)` count as zero; lower ones are an error.
pub const FIDELITY_CLAMP: f64 = 1e-8;

/// Uhlmann fidelity Tr √(√ρ σ √ρ), not squared.
///
/// The spaces must have identical dimensions; labels may differ so that
/// states of different modes can be compared.
pub fn fidelity(a: &QState, b: &QState) -> Result<f64> {
    if a.space().dims() != b.space().dims() {
        return Err(Error::SpaceMismatch(format!(
            "fidelity between dims {:?} and {:?}",
            a.space().dims(),
            b.space().dims()
        )));
    }
    let f = match (a.data(), b.data()) {
        (StateData::Vector(x), StateData::Vector(y)) => x.dotc(y).norm(),
        (StateData::Vector(x), StateData::Density(r)) | (StateData::Density(r), StateData::Vector(x)) => {
            (x.adjoint() * r * x)[(0, 0)].re.max(0.0).sqrt()
        }
        (StateData::Density(r), StateData::Density(s)) => mixed(r, s)?,
    };
    Ok(f.clamp(0.0, 1.0))
}

/// ‖√ρ √σ‖₁, whose singular values are the square roots of the spectrum of
/// √ρ σ √ρ. Taking them directly avoids a square root of roundoff-level
/// eigenvalues and keeps the result symmetric.
fn mixed(r: &DMatrix<C64>, s: &DMatrix<C64>) -> Result<f64> {
    let prod = sqrtm_psd(r, FIDELITY_CLAMP)? * sqrtm_psd(s, FIDELITY_CLAMP)?;
    Ok(prod.singular_values().sum())
}

/// Fidelity between part `ref_part` of `reference` and part `part` of `target`.
pub fn mode_fidelity(reference: &QState, ref_part: usize, target: &QState, part: usize) -> Result<f64> {
    fidelity(&reduce_to(reference, ref_part)?, &reduce_to(target, part)?)
}
