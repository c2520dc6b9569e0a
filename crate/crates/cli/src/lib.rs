//! Sweeps, tables and plots on top of `sps-core`.

pub mod config;
pub mod optimum;
pub mod output;
pub mod plot;
pub mod sweep;
