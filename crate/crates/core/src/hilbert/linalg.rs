//! Dense Hermitian linear algebra.
//!
//! All spectra taken in this crate belong to Hermitian matrices, so the
//! Hermitian eigen-decomposition is the only dense factorization used.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by the eigen-solvers.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Dimension above which [`min_eigenvalue`] switches to a Lanczos estimate.
pub const EXACT_SPECTRUM_LIMIT: usize = 400;

pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(m: &DMatrix<C64>) -> Result<()> {
    let d = hermiticity_defect(m);
    if d > HERMITIAN_TOL {
        return Err(Error::NumericValidity(format!(
            "matrix is not Hermitian (defect {d:.3e})"
        )));
    }
    Ok(())
}

fn symmetrized(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// nalgebra's symmetric QR can return NaN when entries span many decades
/// (pure squeezed states reach 1e-50). Shifting by a norm bound moves the
/// spectrum away from the underflowing scale without costing absolute
/// accuracy; the shift is removed from the returned values.
fn shifted_retry(h: &DMatrix<C64>) -> (f64, DMatrix<C64>) {
    let shift = h.norm().max(f64::MIN_POSITIVE);
    let n = h.nrows();
    (shift, h + DMatrix::<C64>::identity(n, n) * C64::new(shift, 0.0))
}

fn finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Eigenvalues (ascending) and matching eigenvector columns.
pub fn eig_hermitian(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    check_hermitian(m)?;
    let h = symmetrized(m);
    let mut eig = h.clone().symmetric_eigen();
    if !finite(&eig.eigenvalues) || eig.eigenvectors.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        let (shift, h) = shifted_retry(&h);
        eig = h.symmetric_eigen();
        eig.eigenvalues.add_scalar_mut(-shift);
    }
    if !finite(&eig.eigenvalues) {
        return Err(Error::NumericValidity("eigen-decomposition did not converge".into()));
    }
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Ascending real spectrum of a Hermitian matrix.
pub fn eig_hermitian_values(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let h = symmetrized(m);
    let mut vals = h.clone().symmetric_eigenvalues();
    if !finite(&vals) {
        let (shift, h) = shifted_retry(&h);
        vals = h.symmetric_eigenvalues();
        vals.add_scalar_mut(-shift);
    }
    if !finite(&vals) {
        return Err(Error::NumericValidity("eigen-decomposition did not converge".into()));
    }
    let mut v: Vec<f64> = vals.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(m: &DMatrix<C64>) -> Result<f64> {
    Ok(eig_hermitian_values(m)?.iter().map(|x| x.abs()).sum())
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// `[-clamp, 0)` are treated as zero; anything below is rejected.
pub fn sqrtm_psd(m: &DMatrix<C64>, clamp: f64) -> Result<DMatrix<C64>> {
    let (vals, vecs) = eig_hermitian(m)?;
    if let Some(&worst) = vals.first().filter(|&&v| v < -clamp) {
        return Err(Error::NumericValidity(format!(
            "negative eigenvalue {worst:.3e} in square root"
        )));
    }
    let roots = DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0)),
    );
    let scaled = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |i, j| vecs[(i, j)] * roots[j]);
    Ok(scaled * vecs.adjoint())
}

/// Smallest eigenvalue; exact up to [`EXACT_SPECTRUM_LIMIT`], Lanczos beyond.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> Result<f64> {
    if m.nrows() <= EXACT_SPECTRUM_LIMIT {
        return Ok(eig_hermitian_values(m)?[0]);
    }
    check_hermitian(m)?;
    Ok(lanczos_min(m, 90))
}

/// Lanczos with full reorthogonalization; returns the lowest Ritz value.
fn lanczos_min(m: &DMatrix<C64>, steps: usize) -> f64 {
    let n = m.nrows();
    let k = steps.min(n);
    // deterministic, generic start vector
    let mut q = DVector::from_fn(n, |i, _| C64::new(1.0 + 0.37 * ((i * 7919) % 113) as f64 / 113.0, 0.0));
    q /= C64::new(q.norm(), 0.0);
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(k);
    let mut alpha = Vec::with_capacity(k);
    let mut beta: Vec<f64> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut w = m * &q;
        let a = q.dotc(&w).re;
        alpha.push(a);
        basis.push(q.clone());
        for b in &basis {
            let proj = b.dotc(&w);
            w -= b * proj;
        }
        for b in &basis {
            let proj = b.dotc(&w);
            w -= b * proj;
        }
        let nb = w.norm();
        if nb < 1e-14 {
            break;
        }
        beta.push(nb);
        q = w / C64::new(nb, 0.0);
    }
    let dim = alpha.len();
    let t = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j || j + 1 == i {
            beta[i.min(j)]
        } else {
            0.0
        }
    });
    t.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}
