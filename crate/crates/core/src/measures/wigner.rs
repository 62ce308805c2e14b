//! Single-mode Wigner functions from the Fock-basis Laguerre kernel.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::reduce_to;
use crate::error::{Error, Result};
use crate::hilbert::QState;
use crate::par::{self, Exec};

/// Phase-space window with `resolution` points per axis, endpoints included.
/// x = (a + a†)/√2, p = (a − a†)/(√2 i).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WignerSpec {
    pub x: [f64; 2],
    pub p: [f64; 2],
    pub resolution: usize,
}

impl Default for WignerSpec {
    fn default() -> Self {
        WignerSpec {
            x: [-4.0, 4.0],
            p: [-4.0, 4.0],
            resolution: 128,
        }
    }
}

impl WignerSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[1] > r[0];
        if !ok(self.x) || !ok(self.p) || self.resolution < 2 {
            return Err(Error::InvalidArgument(format!("bad Wigner grid {self:?}")));
        }
        Ok(())
    }

    fn axis(r: [f64; 2], n: usize) -> Vec<f64> {
        let h = (r[1] - r[0]) / (n - 1) as f64;
        (0..n).map(|k| r[0] + k as f64 * h).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x, self.resolution)
    }

    pub fn ps(&self) -> Vec<f64> {
        Self::axis(self.p, self.resolution)
    }

    fn key(&self, truncation: usize) -> [u64; 6] {
        [
            truncation as u64,
            self.resolution as u64,
            self.x[0].to_bits(),
            self.x[1].to_bits(),
            self.p[0].to_bits(),
            self.p[1].to_bits(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    /// `values[(i, j)]` is W(xs[i], ps[j]).
    pub values: DMatrix<f64>,
    /// Largest |Im W| discarded.
    pub imag_residue: f64,
}

impl WignerGrid {
    /// Riemann sum Σ W Δx Δp.
    pub fn integral(&self) -> f64 {
        let dx = self.xs[1] - self.xs[0];
        let dp = self.ps[1] - self.ps[0];
        self.values.sum() * dx * dp
    }
}

/// K[(m, n)] holds the value of W for |m⟩⟨n| (m ≥ n) at every grid point,
/// flattened as i * res + j.
struct Kernel {
    pairs: Vec<(usize, usize)>,
    values: Vec<Vec<C64>>,
}

/// Generalized Laguerre polynomials L_n^k(x) for n = 0..=nmax.
fn laguerre(nmax: usize, k: usize, x: f64) -> Vec<f64> {
    let k = k as f64;
    let mut l = Vec::with_capacity(nmax + 1);
    l.push(1.0);
    if nmax >= 1 {
        l.push(1.0 + k - x);
    }
    for n in 1..nmax {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + k - x) * l[n] - (nf + k) * l[n - 1]) / (nf + 1.0);
        l.push(next);
    }
    l
}

fn build_kernel(truncation: usize, spec: &WignerSpec, exec: Exec) -> Kernel {
    let xs = spec.xs();
    let ps = spec.ps();
    let res = spec.resolution;
    let pairs: Vec<(usize, usize)> = (0..truncation)
        .flat_map(|m| (0..=m).map(move |n| (m, n)))
        .collect();
    // Per grid point, all kernel entries; transposed afterwards.
    let points = par::map_range(exec, res * res, |idx| {
        let (x, p) = (xs[idx / res], ps[idx % res]);
        // β = (x + i p)/√2, so 4|β|² = 2(x² + p²)
        let beta = C64::new(x, p) / std::f64::consts::SQRT_2;
        let r = 4.0 * beta.norm_sqr();
        let gauss = (-0.5 * r).exp() / std::f64::consts::PI;
        let two_beta_conj = beta.conj() * 2.0;
        let lags: Vec<Vec<f64>> = (0..truncation).map(|k| laguerre(truncation - 1 - k, k, r)).collect();
        let mut out = vec![C64::new(0.0, 0.0); pairs.len()];
        let mut slot = 0;
        for m in 0..truncation {
            for n in 0..=m {
                let k = m - n;
                let lag = lags[k][n];
                // √(n!/m!) = 1/√((n+1)···m)
                let ratio: f64 = ((n + 1)..=m).map(|v| 1.0 / (v as f64).sqrt()).product();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                out[slot] = two_beta_conj.powi(k as i32) * (sign * ratio * lag * gauss);
                slot += 1;
            }
        }
        out
    });
    let values = (0..pairs.len())
        .map(|s| points.iter().map(|pt| pt[s]).collect())
        .collect();
    Kernel { pairs, values }
}

type KernelCache = Mutex<HashMap<[u64; 6], Arc<Kernel>>>;

fn kernel(truncation: usize, spec: &WignerSpec, exec: Exec) -> Arc<Kernel> {
    static CACHE: OnceLock<KernelCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = spec.key(truncation);
    if let Some(k) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return k.clone();
    }
    let k = Arc::new(build_kernel(truncation, spec, exec));
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .entry(key)
        .or_insert(k)
        .clone()
}

/// W(x, p) of a single-mode state.
pub fn wigner(state: &QState, spec: &WignerSpec, exec: Exec) -> Result<WignerGrid> {
    let parts = state.space().parts();
    if parts.len() != 1 || !parts[0].kind.is_boson() {
        return Err(Error::SpaceShape("Wigner function needs one bosonic mode".into()));
    }
    spec.validate()?;
    let rho = state.density_matrix();
    let trunc = rho.nrows();
    let ker = kernel(trunc, spec, exec);
    let res = spec.resolution;
    let mut acc = vec![C64::new(0.0, 0.0); res * res];
    for (&(m, n), vals) in ker.pairs.iter().zip(&ker.values) {
        // |m⟩⟨n| and its adjoint |n⟩⟨m| together contribute 2 Re(ρ_mn K_mn)
        // for Hermitian ρ; keep both terms to expose any imaginary residue.
        let (c, c_adj) = (rho[(m, n)], if m == n { C64::new(0.0, 0.0) } else { rho[(n, m)] });
        if c == C64::new(0.0, 0.0) && c_adj == C64::new(0.0, 0.0) {
            continue;
        }
        for (a, k) in acc.iter_mut().zip(vals) {
            *a += c * k + c_adj * k.conj();
        }
    }
    let imag_residue = acc.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok(WignerGrid {
        xs: spec.xs(),
        ps: spec.ps(),
        values: DMatrix::from_fn(res, res, |i, j| acc[i * res + j].re),
        imag_residue,
    })
}

/// Wigner function of the reduced state of part `part`.
pub fn wigner_mode(state: &QState, part: usize, spec: &WignerSpec, exec: Exec) -> Result<WignerGrid> {
    wigner(&reduce_to(state, part)?, spec, exec)
}
