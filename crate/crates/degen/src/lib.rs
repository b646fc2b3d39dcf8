//! Command-line driver for `degen-core`: TOML configuration, CSV/JSON output and the
//! `solve`, `verify`, `critical-mass`, `mild-oracle` and `steady-state` commands.

pub mod commands;
pub mod config;
pub mod output;
