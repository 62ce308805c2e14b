//! Initial states: squeezed vacuum, even cat, thermal, Fock and ground.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{destroy, CompositeSpace, QState, SubsystemKind, SubsystemSpec};

/// Largest infinite-space population allowed outside the truncation.
pub const DEFAULT_MAX_TAIL: f64 = 1e-3;

/// Preparation of one subsystem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeRecipe {
    Ground,
    /// Fock number for bosons, level index for atoms.
    Fock(usize),
    /// ξ = r e^{iθ}.
    Squeezed {
        r: f64,
        #[serde(default)]
        theta: f64,
    },
    /// Even cat with amplitude α = re + i·im.
    Cat {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Thermal(f64),
}

/// Population of the infinite-space squeezed vacuum at Fock n ≥ `truncation`.
pub fn squeezed_tail(truncation: usize, r: f64) -> f64 {
    let t2 = r.tanh().powi(2);
    // P(0) = 1/cosh r, P(2m+2)/P(2m) = (2m+1)/(2m+2) tanh² r
    let mut p = 1.0 / r.cosh();
    let mut n = 0usize;
    let mut tail = 0.0f64;
    while n < truncation || p > 1e-20 * tail.max(1e-300) {
        if n >= truncation {
            tail += p;
        }
        p *= (n as f64 + 1.0) / (n as f64 + 2.0) * t2;
        n += 2;
        if n > 1_000_000 || p == 0.0 {
            break;
        }
    }
    tail
}

/// N² of N(|α⟩ + |−α⟩).
pub fn cat_normalization(alpha: C64) -> f64 {
    1.0 / (2.0 * (1.0 + (-2.0 * alpha.norm_sqr()).exp()))
}

/// Population of the infinite-space even cat at Fock n ≥ `truncation`.
pub fn cat_tail(truncation: usize, alpha: C64) -> f64 {
    let x = alpha.norm_sqr();
    // P(n) = 4 N² e^{−|α|²} |α|^{2n} / n!, n even
    let mut p = 4.0 * cat_normalization(alpha) * (-x).exp();
    let mut tail = 0.0f64;
    let mut n = 0usize;
    loop {
        if n >= truncation {
            tail += p;
            if p < 1e-20 * tail.max(1e-300) || p == 0.0 {
                break;
            }
        }
        p *= x * x / ((n + 1) as f64 * (n + 2) as f64);
        n += 2;
        if n > 1_000_000 {
            break;
        }
    }
    tail
}

fn check_tail(truncation: usize, tail: f64, limit: f64) -> Result<()> {
    if tail > limit {
        return Err(Error::TruncationTooSmall {
            truncation,
            tail,
            limit,
        });
    }
    Ok(())
}

fn squeezed_amplitudes(truncation: usize, xi: C64, max_tail: f64) -> Result<DVector<C64>> {
    check_tail(truncation, squeezed_tail(truncation, xi.norm()), max_tail)?;
    let a = destroy(truncation)?.to_dense();
    let ad = a.adjoint();
    let gen = (&a * &a * xi.conj() - &ad * &ad * xi) * C64::new(0.5, 0.0);
    let v: DVector<C64> = gen.exp().column(0).into_owned();
    Ok(&v / C64::new(v.norm(), 0.0))
}

fn cat_amplitudes(truncation: usize, alpha: C64, max_tail: f64) -> Result<DVector<C64>> {
    check_tail(truncation, cat_tail(truncation, alpha), max_tail)?;
    let mut v = DVector::zeros(truncation);
    // α^n / √n! by recurrence, odd terms cancel
    let mut c = C64::new(1.0, 0.0);
    for n in 0..truncation {
        if n % 2 == 0 {
            v[n] = c;
        }
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    Ok(&v / C64::new(v.norm(), 0.0))
}

fn thermal_populations(truncation: usize, nbar: f64) -> Result<Vec<f64>> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::Domain(format!("thermal occupation {nbar} must be >= 0")));
    }
    let ratio = nbar / (1.0 + nbar);
    let raw: Vec<f64> = (0..truncation)
        .map(|n| ratio.powi(n as i32) / (1.0 + nbar))
        .collect();
    let s: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|p| p / s).collect())
}

/// S(ξ)|0⟩ from the matrix exponential of the truncated generator,
/// renormalized.
pub fn squeezed_vacuum(truncation: usize, xi: C64, max_tail: f64) -> Result<QState> {
    let space = CompositeSpace::single_boson(truncation)?;
    QState::vector(&space, squeezed_amplitudes(truncation, xi, max_tail)?)
}

/// N(|α⟩ + |−α⟩) on the truncated space, renormalized.
pub fn cat_state(truncation: usize, alpha: C64, max_tail: f64) -> Result<QState> {
    let space = CompositeSpace::single_boson(truncation)?;
    QState::vector(&space, cat_amplitudes(truncation, alpha, max_tail)?)
}

/// Geometric Fock populations n̄ⁿ/(1+n̄)^{n+1}, renormalized.
pub fn thermal_state(truncation: usize, nbar: f64) -> Result<QState> {
    let space = CompositeSpace::single_boson(truncation)?;
    let p = thermal_populations(truncation, nbar)?;
    let m = DMatrix::from_diagonal(&DVector::from_iterator(truncation, p.iter().map(|&x| C64::new(x, 0.0))));
    QState::density(&space, m)
}

/// Bose-Einstein occupation 1/(e^{ω/T} − 1) with ħ = k_B = 1.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!("temperature {temperature} must be > 0")));
    }
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("frequency {omega} must be > 0")));
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Knobs for [`assemble_initial_state`].
#[derive(Clone, Copy, Debug)]
pub struct AssembleOptions {
    pub max_tail: f64,
    /// Replace thermal factors with n̄ at or below this value by vacuum.
    pub vacuum_thermal_below: Option<f64>,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            max_tail: DEFAULT_MAX_TAIL,
            vacuum_thermal_below: None,
        }
    }
}

/// Initial state plus notes on any approximation made.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub state: QState,
    pub notes: Vec<String>,
}

enum Factor {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

fn factor(part: &SubsystemSpec, recipe: ModeRecipe, opts: &AssembleOptions, notes: &mut Vec<String>) -> Result<Factor> {
    let d = part.dim();
    let basis = |k: usize| -> Result<Factor> {
        if k >= d {
            return Err(Error::InvalidIndex(format!("level {k} of `{}` outside 0..{d}", part.label)));
        }
        let mut v = DVector::zeros(d);
        v[k] = C64::new(1.0, 0.0);
        Ok(Factor::Pure(v))
    };
    match (part.kind, recipe) {
        (_, ModeRecipe::Ground) => basis(0),
        (_, ModeRecipe::Fock(n)) => basis(n),
        (SubsystemKind::Atom { .. }, other) => Err(Error::InvalidArgument(format!(
            "atom `{}` accepts only ground or fock, got {other:?}",
            part.label
        ))),
        (SubsystemKind::Boson { .. }, ModeRecipe::Squeezed { r, theta }) => Ok(Factor::Pure(
            squeezed_amplitudes(d, C64::from_polar(r, theta), opts.max_tail)?,
        )),
        (SubsystemKind::Boson { .. }, ModeRecipe::Cat { re, im }) => {
            Ok(Factor::Pure(cat_amplitudes(d, C64::new(re, im), opts.max_tail)?))
        }
        (SubsystemKind::Boson { .. }, ModeRecipe::Thermal(nbar)) => {
            if nbar == 0.0 {
                return basis(0);
            }
            if let Some(cut) = opts.vacuum_thermal_below {
                if nbar <= cut {
                    notes.push(format!(
                        "thermal n̄ = {nbar} on `{}` replaced by vacuum (initial-state fidelity error <= {nbar})",
                        part.label
                    ));
                    return basis(0);
                }
            }
            let p = thermal_populations(d, nbar)?;
            Ok(Factor::Mixed(DMatrix::from_diagonal(&DVector::from_iterator(
                d,
                p.iter().map(|&x| C64::new(x, 0.0)),
            ))))
        }
    }
}

/// Tensor product of per-subsystem preparations, mixed if any factor is.
pub fn assemble_initial_state(
    recipe: &[ModeRecipe],
    space: &CompositeSpace,
    opts: &AssembleOptions,
) -> Result<Assembled> {
    if recipe.len() != space.len() {
        return Err(Error::InvalidArgument(format!(
            "{} recipes for {} subsystems",
            recipe.len(),
            space.len()
        )));
    }
    let mut notes = Vec::new();
    let factors = space
        .parts()
        .iter()
        .zip(recipe)
        .map(|(p, &r)| factor(p, r, opts, &mut notes))
        .collect::<Result<Vec<_>>>()?;
    let state = if factors.iter().all(|f| matches!(f, Factor::Pure(_))) {
        let v = factors.iter().fold(DVector::from_element(1, C64::new(1.0, 0.0)), |acc, f| match f {
            Factor::Pure(v) => acc.kronecker(v),
            Factor::Mixed(_) => unreachable!(),
        });
        QState::vector(space, v)?
    } else {
        let m = factors.iter().fold(DMatrix::from_element(1, 1, C64::new(1.0, 0.0)), |acc, f| {
            let fm = match f {
                Factor::Pure(v) => v * v.adjoint(),
                Factor::Mixed(m) => m.clone(),
            };
            acc.kronecker(&fm)
        });
        QState::density(space, m)?
    };
    Ok(Assembled { state, notes })
}
