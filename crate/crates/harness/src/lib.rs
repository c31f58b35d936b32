//! Experiment runner: config files, the canonical sweeps, result tables and
//! plot data.

pub mod config;
pub mod error;
pub mod plot;
pub mod sweep;

pub use config::{canonical_text, config_hash, load_config, parse_config};
pub use error::{exit, HarnessError, Result};
pub use plot::{emit_plot_data, PlotStyle};
pub use sweep::{run_sweep, Column, RowStatus, SweepKind, SweepResult, SweepRow, SweepSpec};
