//! Declarative experiments: parse, run, emit.

pub mod config;
pub mod emit;
pub mod library;
pub mod run;

pub use config::{
    set_path, DissipationConfig, EvolutionConfig, HamiltonianConfig, InitialStateConfig, Measurement, OutputConfig,
    Overrides, RunConfig, RwaConfig, Scenario, SpaceConfig, SteadyConfig, SweepAxis, SweepConfig, T2Config,
    STEADY_TRUNCATIONS, TRANSFER_TRUNCATIONS,
};
pub use emit::{emit, format_num, table_csv, wigner_csv, write_atomic};
pub use library::{library, lookup, LibraryEntry};
pub use run::{argmax_in, run, run_with, Cell, ResultBundle, RunDiagnostics, SteadyInfo, Table, WignerSnapshot};
