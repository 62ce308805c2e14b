//! Tensor-product Hilbert spaces, sparse operators, states and reductions.

pub mod linalg;
pub mod operator;
pub mod partial;
pub mod space;
pub mod sparse;
pub mod state;

pub use operator::{atomic_sigma, compose, create, destroy, embed, embed_matrix, number, QOperator};
pub use partial::{partial_trace, partial_transpose};
pub use space::{CompositeSpace, SubsystemKind, SubsystemSpec};
pub use sparse::SparseMatrix;
pub use state::{QState, StateData, StateKind, StateReport};
