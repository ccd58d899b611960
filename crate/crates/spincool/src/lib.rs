//! File formats, experiment runner and reproduction report on top of
//! [`spincool_core`].
//!
//! - [`config`]: TOML experiment configs (system, protocol, optional delay grid, outputs).
//! - [`runner`]: executes a config and renders its artifacts in memory, then
//!   writes them all at once so a failed run leaves nothing behind.
//! - [`export`]: CSV and JSON surface files.
//! - [`parallel`]: multi-threaded grid scans, bit-identical to the sequential ones.
//! - [`golden`]: the pass/fail reproduction table.

pub mod config;
pub mod export;
pub mod golden;
pub mod parallel;
pub mod runner;

pub use config::ExperimentConfig;
pub use runner::{run_config, Artifacts, RunResult};
