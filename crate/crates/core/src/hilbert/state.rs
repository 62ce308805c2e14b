use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::linalg;
use super::space::CompositeSpace;
use crate::error::{Error, Result};

/// Normalization tolerance for validated constructors.
pub const NORM_TOL: f64 = 1e-9;
/// Lowest eigenvalue accepted as numerically positive.
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Vector(DVector<C64>),
    Density(DMatrix<C64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    Vector,
    DensityMatrix,
}

/// Pure or mixed state on a [`CompositeSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    space: CompositeSpace,
    data: StateData,
}

/// Numerical health of a state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StateReport {
    /// |‖ψ‖ − 1| or |Tr ρ − 1|.
    pub norm_error: f64,
    pub hermiticity_defect: f64,
    /// Lowest eigenvalue of ρ (1 for vectors).
    pub min_eigenvalue: f64,
}

impl QState {
    /// Validated state vector: ‖ψ‖ = 1 within [`NORM_TOL`].
    pub fn vector(space: &CompositeSpace, v: DVector<C64>) -> Result<Self> {
        let s = Self::vector_unchecked(space, v)?;
        let r = s.report()?;
        if r.norm_error > NORM_TOL {
            return Err(Error::NumericValidity(format!(
                "state vector norm off by {:.3e}",
                r.norm_error
            )));
        }
        Ok(s)
    }

    /// Validated density matrix: unit trace, Hermitian, numerically positive.
    pub fn density(space: &CompositeSpace, m: DMatrix<C64>) -> Result<Self> {
        let s = Self::density_unchecked(space, m)?;
        let r = s.report()?;
        if r.norm_error > NORM_TOL {
            return Err(Error::NumericValidity(format!("trace off by {:.3e}", r.norm_error)));
        }
        if r.hermiticity_defect > NORM_TOL {
            return Err(Error::NumericValidity(format!(
                "density matrix not Hermitian (defect {:.3e})",
                r.hermiticity_defect
            )));
        }
        if r.min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::NumericValidity(format!(
                "density matrix has eigenvalue {:.3e}",
                r.min_eigenvalue
            )));
        }
        Ok(s)
    }

    /// Shape-checked only.
    pub fn vector_unchecked(space: &CompositeSpace, v: DVector<C64>) -> Result<Self> {
        if v.len() != space.dim() {
            return Err(Error::InvalidDimension(format!(
                "vector length {} vs space dim {}",
                v.len(),
                space.dim()
            )));
        }
        Ok(QState {
            space: space.clone(),
            data: StateData::Vector(v),
        })
    }

    /// Shape-checked only.
    pub fn density_unchecked(space: &CompositeSpace, m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != space.dim() || m.ncols() != space.dim() {
            return Err(Error::InvalidDimension(format!(
                "matrix {}x{} vs space dim {}",
                m.nrows(),
                m.ncols(),
                space.dim()
            )));
        }
        Ok(QState {
            space: space.clone(),
            data: StateData::Density(m),
        })
    }

    /// Product basis ket `|label⟩`.
    pub fn basis(space: &CompositeSpace, label: &[usize]) -> Result<Self> {
        let idx = space.flat_index(label)?;
        let mut v = DVector::zeros(space.dim());
        v[idx] = C64::new(1.0, 0.0);
        Ok(QState {
            space: space.clone(),
            data: StateData::Vector(v),
        })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn kind(&self) -> StateKind {
        match self.data {
            StateData::Vector(_) => StateKind::Vector,
            StateData::Density(_) => StateKind::DensityMatrix,
        }
    }

    pub fn as_vector(&self) -> Option<&DVector<C64>> {
        match &self.data {
            StateData::Vector(v) => Some(v),
            StateData::Density(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&DMatrix<C64>> {
        match &self.data {
            StateData::Vector(_) => None,
            StateData::Density(m) => Some(m),
        }
    }

    /// The density matrix, forming |ψ⟩⟨ψ| for vectors.
    pub fn density_matrix(&self) -> DMatrix<C64> {
        match &self.data {
            StateData::Vector(v) => v * v.adjoint(),
            StateData::Density(m) => m.clone(),
        }
    }

    pub fn to_density(&self) -> QState {
        QState {
            space: self.space.clone(),
            data: StateData::Density(self.density_matrix()),
        }
    }

    /// Tensor product in the order `self ⊗ other`. Mixed if either factor is.
    pub fn tensor(&self, other: &QState) -> Result<QState> {
        let mut parts = self.space.parts().to_vec();
        parts.extend_from_slice(other.space.parts());
        let space = CompositeSpace::new(parts)?;
        let data = match (&self.data, &other.data) {
            (StateData::Vector(a), StateData::Vector(b)) => StateData::Vector(a.kronecker(b)),
            _ => StateData::Density(self.density_matrix().kronecker(&other.density_matrix())),
        };
        Ok(QState { space, data })
    }

    /// Tr ρ, or ‖ψ‖².
    pub fn trace(&self) -> f64 {
        match &self.data {
            StateData::Vector(v) => v.norm_squared(),
            StateData::Density(m) => m.trace().re,
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.data {
            StateData::Vector(v) => v.norm_squared().powi(2),
            StateData::Density(m) => m.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Diagonal in the product basis.
    pub fn populations(&self) -> Vec<f64> {
        match &self.data {
            StateData::Vector(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            StateData::Density(m) => (0..m.nrows()).map(|i| m[(i, i)].re).collect(),
        }
    }

    /// Norm, Hermiticity and positivity diagnostics.
    pub fn report(&self) -> Result<StateReport> {
        Ok(match &self.data {
            StateData::Vector(v) => StateReport {
                norm_error: (v.norm() - 1.0).abs(),
                hermiticity_defect: 0.0,
                min_eigenvalue: 1.0,
            },
            StateData::Density(m) => {
                let herm = linalg::hermiticity_defect(m);
                let min_eigenvalue = if herm <= linalg::HERMITIAN_TOL {
                    linalg::min_eigenvalue(m)?
                } else {
                    f64::NAN
                };
                StateReport {
                    norm_error: (m.trace() - C64::new(1.0, 0.0)).norm(),
                    hermiticity_defect: herm,
                    min_eigenvalue,
                }
            }
        })
    }
}
