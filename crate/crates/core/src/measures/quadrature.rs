use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::reduce_to;
use crate::error::{Error, Result};
use crate::hilbert::QState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub mode: usize,
    pub phase: f64,
    pub quadrature: Quadrature,
}

/// ⟨Q²⟩ − ⟨Q⟩² for X = (O e^{iφ} + O† e^{−iφ})/2 or
/// Y = (O e^{iφ} − O† e^{−iφ})/(2i). Vacuum gives 1/4.
pub fn quadrature_variance(state: &QState, spec: &QuadratureSpec) -> Result<f64> {
    let parts = state.space().parts();
    let part = parts
        .get(spec.mode)
        .ok_or_else(|| Error::InvalidTarget(format!("no part {} for a quadrature", spec.mode)))?;
    if !part.kind.is_boson() {
        return Err(Error::InvalidTarget(format!(
            "quadrature of non-bosonic part `{}`",
            part.label
        )));
    }
    let rho = reduce_to(state, spec.mode)?.density_matrix();
    let n = rho.nrows();
    let ph = C64::from_polar(1.0, spec.phase);
    let a = DMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0) * ph
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let ad = a.adjoint();
    let q = match spec.quadrature {
        Quadrature::X => (&a + &ad) * C64::new(0.5, 0.0),
        Quadrature::Y => (&a - &ad) * C64::new(0.0, -0.5),
    };
    let mean = (&rho * &q).trace().re;
    let sq = (&rho * &q * &q).trace().re;
    Ok(sq - mean * mean)
}
