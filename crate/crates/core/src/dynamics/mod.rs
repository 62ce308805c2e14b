//! Time evolution and steady states.

pub mod evolve;
pub mod grid;
pub mod integrator;
pub mod liouvillian;
pub mod rwa;
pub mod steady;

pub use crate::model::TimeDependentHamiltonian;
pub use evolve::{
    evolve_density, evolve_vector, no_observables, Diagnostics, EvolutionResult, EvolveOptions, Observer, DRIFT_ERROR,
    DRIFT_WARN, POSITIVITY_WARN,
};
pub use grid::TimeGrid;
pub use integrator::{Dopri5, IntegratorOptions, StepStats};
pub use liouvillian::{liouvillian_apply, liouvillian_apply_dense, ApplyPath, Liouvillian};
pub use rwa::{validate_effective_hamiltonian, RwaReport};
pub use steady::{steady_state, SteadyCriteria, SteadyState};
