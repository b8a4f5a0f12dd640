//! Slotted single-cell simulator running the five-step adaptive protocol
//! (measure, estimate, solve, broadcast, act) for the FPFB, FPDB and DPDB
//! variants.

mod config;
mod engine;
mod fading;
mod metrics;

pub use config::{Protocol, SimConfig};
pub use engine::{init_cell, run, run_slot, Departure, RunOutput, Simulator, SlotOutcome};
pub use fading::{FadeSegment, FadingSchedule};
pub use metrics::{MetricsAccumulator, RunSummary, SlotTrace, SUMMARY_COLUMNS, TRACE_COLUMNS};
