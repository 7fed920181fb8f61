//! Quantum search by adiabatic evolution.
//!
//! The crate models the search Hamiltonian
//! `H(s) = (1 - s)(I - |psi0><psi0|) + s (I - |m><m|)`, its analytic spectrum,
//! global and local-adiabatic interpolation schedules, Schrödinger evolution
//! under those schedules, and the experiments that compare their scaling with
//! the database size.

pub mod error;
pub mod evolution;
pub mod experiments;
pub mod hamiltonian;
pub mod integrate;
pub mod output;
pub mod quadrature;
pub mod schedule;
pub mod spectrum;

pub use error::{Error, Result};
pub use evolution::{
    adiabaticity_ratio, evolve, evolve_reduced, instantaneous_ground_fidelity, Engine,
    EvolutionResult, FinalState, TrajectorySample,
};
pub use experiments::{
    fit_power_law, minimal_time, optimality_check, scaling_sweep, schedule_trace, spectrum_trace,
    OptimalityReport, ScalingReport,
};
pub use hamiltonian::{
    apply_hamiltonian, dense_matrix, make_uniform_state, reduced_block, QuantumState,
    SearchHamiltonian,
};
pub use integrate::{IntegratorConfig, Method};
pub use schedule::{
    global_adiabatic_time, linear_schedule, local_s_of_time, local_time_of_s, local_total_time,
    rate, schedule_from_gap, GapModel, Schedule, ScheduleFamily, ScheduleKind,
};
pub use spectrum::{coupling_matrix_element, eigenvalues, gap, min_gap, SpectrumPoint};
