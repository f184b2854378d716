//! Experiment configuration, ε-sweeps, the ansatz bound check and output files.

pub mod bound;
pub mod config;
pub mod io;
pub mod sweep;

pub use bound::{check_ansatz_bound, fit_bound, sample_ansatz_error, BoundCheck, BoundRow, BoundSamples};
pub use config::{default_dx_per_eps, ExperimentConfig};
pub use sweep::{
    ansatz_for, assemble_report, fit_rate, run_case, sweep, sweep_cases, CaseOptions, CaseOutput, ConvergenceReport,
    RateFit, RunRecord, RunSummary,
};
