//! Command implementations behind the `stmeta` binary.
//!
//! Every command takes a validated [`RunConfig`] and writes its files into
//! `out_dir`. Outputs are byte-deterministic for a given config and seed.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

pub use commands::{
    compute_pattern, load_schedules, run_figures, run_pattern, run_synthesize, run_verify, synthesize, ElementRecord,
    FigureEntry, FigureIndex, PatternMetrics, PatternOutcome, ScheduleFile, VerifyOptions, VerifyReport,
};
pub use config::{Overrides, RunConfig};
pub use error::{CliError, Result};
