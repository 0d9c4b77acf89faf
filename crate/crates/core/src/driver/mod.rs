//! Configuration, reference solutions, the simulation loop and its reports,
//! convergence studies, kernel autotuning, and VTK output.

mod cavity;
mod config;
mod converge;
mod run;
mod tune;
mod vtk;

pub use cavity::{analytic_cavity, CavityMode};
pub use config::{Config, InitialCondition, MbChoice, MeshSource, Precision};
pub use converge::{convergence_study, ConvergenceRow, ConvergenceTable};
pub use run::{run_simulation, Discretization, ReportRow, RunReport, Simulation, Solution};
pub use tune::{benchmark_and_tune, default_candidates, Candidate, TuneReport, TuneRow};
pub use vtk::write_vtk;
