//! Run records, per-transaction metrics and the centralized-order audit.

use serde::Serialize;

use crate::committee::{Digest, SequencerId};
use crate::score::{order, Micros, ScoreParams, Transaction};

/// One line of the event log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogRecord {
    /// Simulation time in seconds.
    pub t: f64,
    #[serde(flatten)]
    pub event: LogEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogEvent {
    Submitted { tx: usize, hash: String, delayed: bool, bid: f64, declared: f64 },
    Resolved { hash: String, epoch: u64, tau: f64, tau_prime: f64, complete: bool },
    Included { hash: String, height: u64, tau_prime: f64 },
    Discarded { hash: String, reason: String },
    BlockFinal { height: u64 },
    BatchClosed { block_number: u64 },
    BatchFinal { block_number: u64 },
    BatchPosted { block_number: u64, epoch: u64 },
    BatchRejected { block_number: u64, epoch: u64, reason: String },
    DelayedEnqueued { index: u64, withheld: bool },
    ForceIncluded { index: u64, l1_block: u64, height: u64, timestamp: u64 },
    ForceRejected { index: u64, reason: String },
    EpochStarted { epoch: u64, forced_height: u64, orphaned_blocks: usize, orphan_txs: usize },
    Paused { replica: SequencerId },
    Resumed { replica: SequencerId, backlog: usize },
    RecoveryStarted { replica: SequencerId, cold: bool, nonce: u64 },
    SnapshotFetched { replica: SequencerId, from: SequencerId, accepted: bool },
    Recovered { replica: SequencerId },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TxMetric {
    pub tx: usize,
    pub hash: String,
    pub delayed: bool,
    pub bid: f64,
    pub submit_time: f64,
    pub tau: Option<f64>,
    pub tau_prime: Option<f64>,
    pub included_at: Option<f64>,
    pub height: Option<u64>,
    pub outcome: String,
    pub reason: Option<String>,
    pub delay: Option<f64>,
}

/// A transaction placed on the chain, with the inputs the centralized
/// policy needs. `segment` separates stretches between forced blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedTx {
    pub hash: Digest,
    pub tau: Micros,
    pub fee: f64,
    pub segment: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub compared: usize,
    /// Positions whose transaction differs from the centralized order.
    pub divergent_positions: usize,
    /// Transactions placed after one whose consensus timestamp is at least `g` later.
    pub fairness_violations: usize,
}

/// Recomputes each segment's order with the centralized policy, treating
/// the consensus timestamp as arrival time and the fee as bid.
pub fn compare_to_centralized(chain: &[OrderedTx], params: &ScoreParams) -> DivergenceReport {
    let mut report = DivergenceReport::default();
    let mut start = 0;
    while start < chain.len() {
        let seg = chain[start].segment;
        let end = chain[start..].iter().position(|t| t.segment != seg).map_or(chain.len(), |p| start + p);
        let part = &chain[start..end];
        let txs: Vec<Transaction> = part
            .iter()
            .map(|t| Transaction::at(t.hash.to_hex(), t.tau, t.fee, Vec::new()).expect("consensus inputs are valid"))
            .collect();
        let expected = order(&txs, params);
        report.compared += part.len();
        report.divergent_positions += expected.iter().zip(&txs).filter(|(e, a)| e.id() != a.id()).count();
        let g = Micros::from_secs_f64(params.g);
        let mut latest = Micros(i64::MIN);
        for t in part {
            if latest.0 != i64::MIN && latest.0 - t.tau.0 >= g.0 {
                report.fairness_violations += 1;
            }
            latest = latest.max(t.tau);
        }
        start = end;
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayStats {
    pub count: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl DelayStats {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(DelayStats { count: values.len(), min, mean: values.iter().sum::<f64>() / values.len() as f64, max })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub name: String,
    pub n: usize,
    pub f: usize,
    pub seed: u64,
    pub observer: SequencerId,
    pub submitted: usize,
    pub included: usize,
    pub discarded: usize,
    pub dropped: usize,
    pub liveness: bool,
    pub hit_horizon: bool,
    pub honest_digests: Vec<(SequencerId, String)>,
    pub digests_equal: bool,
    pub batches_identical: bool,
    pub centralized: DivergenceReport,
    pub median_checked: usize,
    pub median_mismatches: usize,
    pub timestamps_monotone: bool,
    pub epochs: usize,
    pub chain_length: usize,
    pub batches_closed: usize,
    pub batches_posted: usize,
    pub batches_rejected: usize,
    pub recovered: Vec<SequencerId>,
    pub still_recovering: Vec<SequencerId>,
    pub delay: Option<DelayStats>,
    pub messages: usize,
    pub end_time: f64,
    pub violations: Vec<String>,
}

impl Metrics {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}
