//! Harness around `arbormatch-core`: edge-list ingestion, instance
//! generation, oracle and estimator runs, and JSON reports.

pub mod commands;
pub mod report;

pub use commands::{
    cmd_estimate, cmd_exact, cmd_generate, cmd_sweep, cmd_verify, CliError, EstimateParams,
    ExactOracles, Oracles, SweepParams, VerifyParams,
};
pub use report::RunReport;
