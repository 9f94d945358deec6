//! Second-quantized transition amplitudes between occupation states.

mod amplitude;
mod migration;
mod smatrix;
mod state;

pub use amplitude::{boson_amplitude, fermion_amplitude, FermionVariant, KernelFn};
pub use migration::{migration_experiment, scenario_sites, MigrationCurve, Scenario, MIGRATION_LATTICES};
pub use smatrix::{count_s_matrices, enumerate_s_matrices, SMatrix, MAX_S_MATRICES};
pub use state::{OccupationState, Statistics};
