//! Run configuration and the `simulate`, `verify` and `z0` commands.

mod commands;
mod config;

pub use commands::{
    cmd_simulate, cmd_verify, cmd_z0, default_out_dir, Summary, Z0Output, REPORTS_JSON, SUMMARY_JSON, TRAJECTORY_CSV,
    TRAJECTORY_JSON,
};
pub use config::{InitialState, RunConfig, SystemConfig};
