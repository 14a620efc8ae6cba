//! Equilibrium solvers for bidding and latency investment, plus the
//! batch-auction benchmark. All functions are pure given their seed.

pub mod benchmark;
pub mod exante;
pub mod expost;
pub mod model;
pub mod numeric;
pub mod partial;
pub mod payoff;
pub mod revenue;

pub use benchmark::{block_auction_compare, BenchmarkReport, BidDistribution};
pub use exante::{exante_budget_eq, exante_latency_mixed_eq, BudgetEquilibrium, Estimate, MixedStrategy};
pub use expost::{
    bidding_share, expost_equilibrium, expost_latency_only, expost_optimal_split, marginal_type, signal_cost,
    BiddingShare, CurvePoint, EquilibriumCurve, LatencyOnly, Split,
};
pub use model::{LatencyTech, SignalTech, TimeBoostSignal, Uniform, ValuationModel};
pub use partial::{full_separation_bid, partial_separation_solve, PartialSeparation, SignalPoint};
pub use payoff::{payoff_equivalence_mc, PayoffReport};
pub use revenue::{revenue_equivalence_check, RevenueReport};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EconError {
    #[error("degenerate valuation model: {0}")]
    DegenerateModel(String),
    #[error("outside the model: {0}")]
    OutOfModel(String),
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("score {s} is not attainable with maximum boost g={g}")]
    InfeasibleScore { s: f64, g: f64 },
    #[error("solver failed: {0}")]
    SolverFailure(String),
    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { got: usize, min: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
