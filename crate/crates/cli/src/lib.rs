//! Experiment harness for random hitting set instances.
//!
//! A sweep walks a grid of `(n, m, p)` points, draws `trials` instances per
//! point, runs the configured solvers and writes one CSV record per trial.
//! The report, plot-data and conjecture commands post-process those records.

pub mod config;
pub mod conjecture;
pub mod record;
pub mod report;
pub mod sweep;

use std::io;

use randhs_core::HsError;
use thiserror::Error;

pub use config::{Conjecture, ExperimentConfig, GridPoint, ProbSpec, SizeSpec, SolverSet};
pub use conjecture::{conjecture_probe, ConjectureRow, ConjectureTable};
pub use record::{fmt_sig, read_records, write_records, ExperimentRecord, CSV_HEADER};
pub use report::{emit_plot_data, gap_report, GapSummary, PointSummary};
pub use sweep::{run_sweep, run_sweep_with, trial_seed};

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no records to summarise")]
    EmptyInput,

    /// A record broke the `lp_lb ≤ val_lp ≤ val_ip ≤ min(val_gr, val_bgr)` chain.
    #[error("sandwich audit failed: {0}")]
    Audit(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] HsError),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 config error, 3 infeasible instance, 4 resource guard tripped, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(HsError::Infeasible { .. }) => 3,
            CliError::Core(HsError::TooLarge { .. } | HsError::DimensionOverflow { .. }) => 4,
            CliError::Core(
                HsError::InvalidArgument(_) | HsError::InvalidProbability(_) | HsError::Parse { .. },
            ) => 2,
            _ => 1,
        }
    }
}
