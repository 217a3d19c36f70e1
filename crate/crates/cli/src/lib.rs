//! Command-line front end for `metacouple`: scene files in, CSV/JSON out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{
    cmd_channel, cmd_impedance, cmd_sweep, cmd_validate, evaluate_channel, run_sweep,
    run_validation, sweep_scene, RunOptions, SweepParam, SweepRow,
};
pub use config::SceneConfig;
pub use error::{CliError, Result};
