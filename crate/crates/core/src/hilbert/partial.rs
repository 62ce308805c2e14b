//! Partial trace and partial transpose.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::space::CompositeSpace;
use super::state::{QState, StateData};
use crate::error::{Error, Result};

/// For every traced configuration `t`, the flat indices of the kept
/// configurations in order: `table[t * dk + k]`.
fn index_table(space: &CompositeSpace, keep: &[usize]) -> (usize, usize, Vec<usize>) {
    let dims = space.dims();
    let dk: usize = keep.iter().map(|&i| dims[i]).product();
    let dt = space.dim() / dk;
    let mut table = vec![0; space.dim()];
    for i in 0..space.dim() {
        let label = space.unflatten(i);
        let (mut k, mut t) = (0, 0);
        for (p, (&n, &d)) in label.iter().zip(dims).enumerate() {
            if keep.contains(&p) {
                k = k * d + n;
            } else {
                t = t * d + n;
            }
        }
        table[t * dk + k] = i;
    }
    (dk, dt, table)
}

/// Reduced state on the parts listed in `keep` (canonical order kept).
///
/// Vector input is accepted and yields the reduced density matrix directly.
pub fn partial_trace(state: &QState, keep: &[usize]) -> Result<QState> {
    let space = state.space();
    let keep = space.normalize_keep(keep)?;
    let sub = space.subspace(&keep)?;
    if keep.len() == space.len() {
        return Ok(state.to_density());
    }
    let (dk, dt, table) = index_table(space, &keep);
    let reduced = match state.data() {
        StateData::Vector(psi) => {
            let m = DMatrix::from_fn(dk, dt, |k, t| psi[table[t * dk + k]]);
            &m * m.adjoint()
        }
        StateData::Density(rho) => {
            let mut out = DMatrix::<C64>::zeros(dk, dk);
            for t in 0..dt {
                let row = &table[t * dk..(t + 1) * dk];
                for (k2, &j) in row.iter().enumerate() {
                    for (k1, &i) in row.iter().enumerate() {
                        out[(k1, k2)] += rho[(i, j)];
                    }
                }
            }
            out
        }
    };
    QState::density_unchecked(&sub, reduced)
}

/// Transpose the indices of part `part`.
pub fn partial_transpose(state: &QState, part: usize) -> Result<DMatrix<C64>> {
    let rho = state.as_density().ok_or_else(|| {
        Error::WrongKind("partial transpose needs a density matrix".into())
    })?;
    let space = state.space();
    if part >= space.len() {
        return Err(Error::InvalidIndex(format!(
            "part {part} outside {} parts",
            space.len()
        )));
    }
    let stride = space.stride(part);
    let d = space.dims()[part];
    let digit = |i: usize| (i / stride) % d;
    let n = space.dim();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (digit(i), digit(j));
        let i2 = i - a * stride + b * stride;
        let j2 = j - b * stride + a * stride;
        rho[(i2, j2)]
    }))
}
