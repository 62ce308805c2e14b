use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::sparse::SparseMatrix;
use super::space::{CompositeSpace, SubsystemSpec};
use super::state::{QState, StateData};
use crate::error::{Error, Result};

/// Sparse operator tagged with the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct QOperator {
    space: CompositeSpace,
    matrix: SparseMatrix,
}

fn same_space(a: &CompositeSpace, b: &CompositeSpace) -> Result<()> {
    if a != b {
        return Err(Error::SpaceMismatch(format!(
            "operands live on {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

impl QOperator {
    pub fn new(space: CompositeSpace, matrix: SparseMatrix) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::InvalidDimension(format!(
                "matrix is {}x{}, space has dim {}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim()
            )));
        }
        Ok(QOperator { space, matrix })
    }

    pub fn zero(space: &CompositeSpace) -> Self {
        QOperator {
            matrix: SparseMatrix::zeros(space.dim(), space.dim()),
            space: space.clone(),
        }
    }

    pub fn identity(space: &CompositeSpace) -> Self {
        QOperator {
            matrix: SparseMatrix::identity(space.dim()),
            space: space.clone(),
        }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.to_dense()
    }

    pub fn dag(&self) -> Self {
        QOperator {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        QOperator {
            space: self.space.clone(),
            matrix: self.matrix.scale(c),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(C64::new(1.0, 0.0), other)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: C64, other: &Self) -> Result<Self> {
        same_space(&self.space, &other.space)?;
        Ok(QOperator {
            space: self.space.clone(),
            matrix: self.matrix.add_scaled(c, &other.matrix),
        })
    }

    /// Operator product `self * other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        same_space(&self.space, &other.space)?;
        Ok(QOperator {
            space: self.space.clone(),
            matrix: self.matrix.mul(&other.matrix),
        })
    }

    /// `self + self†`.
    pub fn plus_hc(&self) -> Self {
        QOperator {
            space: self.space.clone(),
            matrix: self.matrix.add_scaled(C64::new(1.0, 0.0), &self.matrix.adjoint()),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.matrix.is_hermitian(tol)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.nnz() == 0
    }

    /// `Tr(ρ O)` for densities, `⟨ψ|O|ψ⟩` for vectors. The imaginary part is
    /// returned as computed.
    pub fn expectation(&self, state: &QState) -> Result<C64> {
        same_space(&self.space, state.space())?;
        Ok(match state.data() {
            StateData::Vector(psi) => {
                let mut y = vec![C64::new(0.0, 0.0); psi.len()];
                self.matrix.matvec(psi.as_slice(), &mut y);
                psi.iter().zip(&y).map(|(a, b)| a.conj() * b).sum()
            }
            StateData::Density(rho) => self
                .matrix
                .triplets()
                .map(|(i, j, o)| o * rho[(j, i)])
                .sum(),
        })
    }
}

/// Weighted sum `Σ w_k ops_k`.
pub fn compose(ops: &[QOperator], weights: &[C64]) -> Result<QOperator> {
    if ops.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "{} operators but {} weights",
            ops.len(),
            weights.len()
        )));
    }
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidArgument("compose needs at least one operator".into()))?;
    for op in ops {
        same_space(first.space(), op.space())?;
    }
    let dim = first.space.dim();
    let matrix = SparseMatrix::from_triplets(
        dim,
        dim,
        ops.iter()
            .zip(weights)
            .flat_map(|(op, &w)| op.matrix.triplets().map(move |(i, j, v)| (i, j, w * v))),
    );
    Ok(QOperator {
        space: first.space.clone(),
        matrix,
    })
}

fn ladder(truncation: usize) -> Result<SparseMatrix> {
    if truncation < 2 {
        return Err(Error::InvalidDimension(format!(
            "boson truncation {truncation} < 2"
        )));
    }
    Ok(SparseMatrix::from_triplets(
        truncation,
        truncation,
        (1..truncation).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))),
    ))
}

/// Annihilation operator on a single truncated mode.
pub fn destroy(truncation: usize) -> Result<QOperator> {
    let space = CompositeSpace::single_boson(truncation)?;
    QOperator::new(space, ladder(truncation)?)
}

pub fn create(truncation: usize) -> Result<QOperator> {
    Ok(destroy(truncation)?.dag())
}

pub fn number(truncation: usize) -> Result<QOperator> {
    let space = CompositeSpace::single_boson(truncation)?;
    let diag: Vec<C64> = (0..truncation).map(|n| C64::new(n as f64, 0.0)).collect();
    QOperator::new(space, SparseMatrix::diagonal(&diag))
}

/// `|k⟩⟨l|` on a single atom.
pub fn atomic_sigma(levels: usize, k: usize, l: usize) -> Result<QOperator> {
    let space = CompositeSpace::single(SubsystemSpec::atom("atom", levels))?;
    if k >= levels || l >= levels {
        return Err(Error::InvalidIndex(format!(
            "sigma({k},{l}) outside {levels} levels"
        )));
    }
    QOperator::new(
        space,
        SparseMatrix::from_triplets(levels, levels, [(k, l, C64::new(1.0, 0.0))]),
    )
}

/// Lift a single-subsystem operator onto part `index` of `space`.
pub fn embed(op: &QOperator, index: usize, space: &CompositeSpace) -> Result<QOperator> {
    embed_matrix(op.matrix(), index, space)
}

/// Lift a raw square matrix onto part `index` of `space`.
pub fn embed_matrix(m: &SparseMatrix, index: usize, space: &CompositeSpace) -> Result<QOperator> {
    if index >= space.len() {
        return Err(Error::InvalidEmbedding(format!(
            "index {index} outside {} parts",
            space.len()
        )));
    }
    let d = space.dims()[index];
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::InvalidEmbedding(format!(
            "operator is {}x{}, part `{}` has dim {d}",
            m.nrows(),
            m.ncols(),
            space.parts()[index].label
        )));
    }
    let right = space.stride(index);
    let left = space.dim() / (d * right);
    let mut t = Vec::with_capacity(left * right * m.nnz());
    for l in 0..left {
        for (i, j, v) in m.triplets() {
            let (ri, cj) = ((l * d + i) * right, (l * d + j) * right);
            for r in 0..right {
                t.push((ri + r, cj + r, v));
            }
        }
    }
    QOperator::new(space.clone(), SparseMatrix::from_triplets(space.dim(), space.dim(), t))
}
