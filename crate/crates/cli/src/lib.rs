//! Config-driven runner for the circleweb verifications and figures.

pub mod config;
pub mod expr;
pub mod run;

pub use config::{parse_config, Command, ConfigError, RunConfig, Thresholds};
pub use run::{execute, run, Check, Execution, Outcome, Report, RunError, EXIT_FAILED, EXIT_INVALID, EXIT_OK};
