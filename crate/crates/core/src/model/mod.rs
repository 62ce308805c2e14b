//! Parameters, Hamiltonians, dissipators and initial states of the network.

pub mod dissipators;
pub mod hamiltonian;
pub mod params;
pub mod states;

pub use dissipators::{build_dissipators, Channel, DissipatorSpec};
pub use hamiltonian::{
    build_drive_hamiltonian, build_effective_hamiltonian, build_full_hamiltonian,
    build_squeeze_pump, build_time_dependent_a12, NetworkOps, PumpTarget,
    TimeDependentHamiltonian,
};
pub use params::{Phases, SystemParams};
pub use states::{
    assemble_initial_state, cat_state, squeezed_vacuum, thermal_occupation, thermal_state,
    AssembleOptions, Assembled, ModeRecipe, DEFAULT_MAX_TAIL,
};
