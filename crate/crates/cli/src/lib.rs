//! Experiment orchestration for the random-access simulator: configuration,
//! parameter sweeps, the deep-fade scenario, verification suites and plots.

pub mod commands;
pub mod config;
pub mod plot;
pub mod scenario;
pub mod sweep;
pub mod verify;
