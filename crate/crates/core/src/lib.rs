//! Score-based transaction ordering with bid time boosts.
//!
//! - [`score`]: the centralized ordering policy and pending queue.
//! - [`econ`]: equilibrium solvers for bidding and latency races.
//! - [`committee`]: the decentralized sequencer as a replicated state machine.
//! - [`sim`]: a seeded discrete-event harness for committee scenarios.
//! - [`cli`]: subcommand implementations behind the `timeboost` binary.

pub mod cli;
pub mod committee;
pub mod econ;
pub mod score;
pub mod sim;
