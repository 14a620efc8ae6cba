//! Seeded discrete-event simulation of a sequencer committee.
//!
//! Replicas talk only through a simulated atomic broadcast: every message
//! lands in one global log and each replica consumes that log in order,
//! each with its own random delay. Users reach each sequencer with their
//! own latency, and an L1 stub provides the delayed inbox, batch posting
//! and forced inclusion.

mod config;
mod engine;
mod metrics;

pub use config::{Action, ConfigError, Range, ScriptStep, SimConfig, Workload};
pub use engine::{run_scenario, SimOutcome};
pub use metrics::{
    compare_to_centralized, DelayStats, DivergenceReport, LogEvent, LogRecord, Metrics, OrderedTx, TxMetric,
};
