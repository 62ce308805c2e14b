//! Matrix-free Lindblad generator acting on column-major density matrices.

use std::sync::Mutex;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{QOperator, QState, SparseMatrix};
use crate::model::DissipatorSpec;
use crate::par::{self, Exec};

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

enum JumpKind {
    /// Row i holds at most one entry `w[i]` at column `src[i]`.
    Monomial { src: Vec<usize>, w: Vec<C64> },
    General(SparseMatrix),
}

struct Jump {
    rate: f64,
    kind: JumpKind,
}

/// Which algebraic route [`Liouvillian::apply_into`] takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApplyPath {
    /// Valid for any ρ.
    General,
    /// Uses ρ H_eff† = (H_eff ρ)†, valid only for Hermitian ρ.
    Hermitian,
}

/// ρ ↦ −i[H, ρ] + Σ Γ (O ρ O† − ½{O†O, ρ}), never materialized.
pub struct Liouvillian {
    dim: usize,
    /// H − (i/2) Σ Γ O†O.
    h_eff: SparseMatrix,
    jumps: Vec<Jump>,
    exec: Exec,
    scratch: Mutex<Vec<C64>>,
}

const NONE: usize = usize::MAX;

impl Liouvillian {
    pub fn new(h: &QOperator, dissipators: &DissipatorSpec, exec: Exec) -> Result<Self> {
        let dim = h.space().dim();
        let mut h_eff = h.matrix().clone();
        let mut jumps = Vec::with_capacity(dissipators.len());
        for ch in &dissipators.channels {
            if ch.op.space() != h.space() {
                return Err(Error::SpaceMismatch(format!(
                    "jump operator `{}` lives on a different space than H",
                    ch.name
                )));
            }
            let o = ch.op.matrix();
            let odo = o.adjoint().mul(o);
            h_eff = h_eff.add_scaled(C64::new(0.0, -0.5 * ch.rate), &odo);
            let kind = if o.is_monomial() {
                let mut src = vec![NONE; dim];
                let mut w = vec![ZERO; dim];
                for (i, j, v) in o.triplets() {
                    src[i] = j;
                    w[i] = v;
                }
                JumpKind::Monomial { src, w }
            } else {
                JumpKind::General(o.clone())
            };
            jumps.push(Jump { rate: ch.rate, kind });
        }
        Ok(Liouvillian {
            dim,
            h_eff,
            jumps,
            exec,
            scratch: Mutex::new(Vec::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_dissipation(&self) -> bool {
        !self.jumps.is_empty()
    }

    /// Add Σ Γ (O ρ O†)[i, j] into `out[i]` for rows i ≥ `from` (monomial
    /// jumps skip the rows above; general ones fill every row).
    fn add_jumps(&self, rho: &[C64], j: usize, from: usize, out: &mut [C64]) {
        let d = self.dim;
        for jump in &self.jumps {
            match &jump.kind {
                JumpKind::Monomial { src, w } => {
                    let sj = src[j];
                    if sj == NONE {
                        continue;
                    }
                    let coef = w[j].conj() * jump.rate;
                    let col = &rho[sj * d..(sj + 1) * d];
                    for (i, o) in out.iter_mut().enumerate().skip(from) {
                        let si = src[i];
                        if si != NONE {
                            *o += coef * w[i] * col[si];
                        }
                    }
                }
                JumpKind::General(op) => {
                    let mut tmp = vec![ZERO; d];
                    let (cols, vals) = op.row(j);
                    for (&l, &v) in cols.iter().zip(vals) {
                        let c = v.conj();
                        for (t, r) in tmp.iter_mut().zip(&rho[l * d..(l + 1) * d]) {
                            *t += c * r;
                        }
                    }
                    op.matvec_add(C64::new(jump.rate, 0.0), &tmp, out);
                }
            }
        }
    }

    /// `out = L(rho)` on column-major `dim × dim` slices.
    pub fn apply_into(&self, rho: &[C64], out: &mut [C64], path: ApplyPath) {
        let d = self.dim;
        assert_eq!(rho.len(), d * d);
        assert_eq!(out.len(), d * d);
        match path {
            ApplyPath::General => {
                par::for_each_chunk_mut(self.exec, out, d, |j, col| {
                    self.h_eff.matvec(&rho[j * d..(j + 1) * d], col);
                    for c in col.iter_mut() {
                        *c *= -I;
                    }
                    // + i ρ H_eff†: column j mixes columns k of ρ with conj(H_eff[j, k])
                    let (ks, vs) = self.h_eff.row(j);
                    for (&k, &v) in ks.iter().zip(vs) {
                        let c = I * v.conj();
                        for (o, r) in col.iter_mut().zip(&rho[k * d..(k + 1) * d]) {
                            *o += c * r;
                        }
                    }
                    self.add_jumps(rho, j, 0, col);
                });
            }
            ApplyPath::Hermitian => {
                let mut x = self.scratch.lock().unwrap_or_else(|e| e.into_inner());
                x.resize(d * d, ZERO);
                par::for_each_chunk_mut(self.exec, &mut x, d, |j, col| {
                    self.h_eff.matvec(&rho[j * d..(j + 1) * d], col);
                });
                let x: &[C64] = &x;
                // The result is Hermitian: build the lower triangle, then mirror.
                par::for_each_chunk_mut(self.exec, out, d, |j, col| {
                    // −i X + (−i X)†
                    for (i, o) in col.iter_mut().enumerate().skip(j) {
                        *o = -I * x[j * d + i] + I * x[i * d + j].conj();
                    }
                    self.add_jumps(rho, j, j, col);
                });
                for j in 1..d {
                    for i in 0..j {
                        out[j * d + i] = out[i * d + j].conj();
                    }
                }
            }
        }
    }

    /// L(ρ) as a new matrix, through the general path.
    pub fn apply(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        self.check_shape(rho)?;
        let mut out = DMatrix::zeros(self.dim, self.dim);
        self.apply_into(rho.as_slice(), out.as_mut_slice(), ApplyPath::General);
        Ok(out)
    }

    /// L(ρ) through the Hermitian route; caller guarantees ρ = ρ†.
    pub fn apply_hermitian(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        self.check_shape(rho)?;
        let mut out = DMatrix::zeros(self.dim, self.dim);
        self.apply_into(rho.as_slice(), out.as_mut_slice(), ApplyPath::Hermitian);
        Ok(out)
    }

    fn check_shape(&self, rho: &DMatrix<C64>) -> Result<()> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::InvalidDimension(format!(
                "density matrix is {}x{}, generator acts on dim {}",
                rho.nrows(),
                rho.ncols(),
                self.dim
            )));
        }
        Ok(())
    }
}

/// dρ/dt for a density-matrix state.
pub fn liouvillian_apply(h: &QOperator, dissipators: &DissipatorSpec, rho: &QState) -> Result<DMatrix<C64>> {
    if rho.space() != h.space() {
        return Err(Error::SpaceMismatch("state and Hamiltonian spaces differ".into()));
    }
    let m = rho
        .as_density()
        .ok_or_else(|| Error::WrongKind("Liouvillian acts on density matrices".into()))?;
    Liouvillian::new(h, dissipators, Exec::default())?.apply(m)
}

/// Dense reference generator, for tests and small systems.
pub fn liouvillian_apply_dense(h: &QOperator, dissipators: &DissipatorSpec, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let hd = h.to_dense();
    let mut out = (&hd * rho - rho * &hd) * -I;
    for ch in &dissipators.channels {
        let o = ch.op.to_dense();
        let od = o.adjoint();
        let odo = &od * &o;
        out += (&o * rho * &od - (&odo * rho + rho * &odo) * C64::new(0.5, 0.0)) * C64::new(ch.rate, 0.0);
    }
    out
}
