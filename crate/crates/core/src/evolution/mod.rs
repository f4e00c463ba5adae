//! Reduced evolution system, compatible initial data and time stepping.

mod config;
mod rhs;
mod run;
mod step;

pub use config::{check_cfl, max_phase_speed, stable_dt, EvolutionConfig, Guards};
pub use rhs::{assemble_rhs, surface_bernoulli, RhsBundle};
pub use run::{compatibility_ratio, run_simulation, DiagnosticsSink, NullSink, RunAbort, RunSummary};
pub use step::{
    construct_initial_data, initial_time_derivatives, solve_for_phi_rate, step_rk4, time_derivative,
    InitialDataReport, TimeDerivative,
};
