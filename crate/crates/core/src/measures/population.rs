use crate::error::{Error, Result};
use crate::hilbert::{QState, StateData};

/// Probability of the product basis state `label`.
pub fn population(state: &QState, label: &[usize]) -> Result<f64> {
    let i = state.space().flat_index(label)?;
    Ok(match state.data() {
        StateData::Vector(v) => v[i].norm_sqr(),
        StateData::Density(m) => m[(i, i)].re,
    })
}

/// Probability that part `part` holds level `n`, summed over everything else.
pub fn part_population(state: &QState, part: usize, n: usize) -> Result<f64> {
    let space = state.space();
    let dims = space.dims();
    if part >= dims.len() || n >= dims[part] {
        return Err(Error::InvalidIndex(format!(
            "level {n} of part {part} outside dims {dims:?}"
        )));
    }
    let stride = space.stride(part);
    let pops = state.populations();
    Ok(pops
        .iter()
        .enumerate()
        .filter(|(i, _)| (i / stride) % dims[part] == n)
        .map(|(_, p)| p)
        .sum())
}
