//! Configuration, benchmark problems, run orchestration and studies.

pub mod config;
pub mod output;
pub mod problems;
pub mod run;
pub mod studies;

pub use config::{InitialField, Population, ProblemKind, ProblemParams, RunConfig, StudyParams};
pub use problems::{analytic_field, initial_condition, initial_state};
pub use run::{run_simulation, DriftRange, DriftSummary, RunOutput, Simulation};
pub use studies::{
    cfl_sweep, conservation_study, reversibility_study, ReversibilityRow, SweepRow, Table,
};
