//! Centralized score-based ordering.
//!
//! A transaction arriving at time `t` with bid `b` gets the score
//! `time_boost(b) - t`, where `time_boost(b) = g*b/(b+c)` is bounded above by
//! the maximum boost `g`. Transactions are emitted in decreasing score order,
//! and a transaction with score `s` is safe to emit once the clock reaches
//! `g - s`: nothing that arrives later can beat it.

mod feed;
mod queue;

pub use feed::{feed_entries, read_transactions, write_feed, FeedEntry, FeedError, TxRecord};
pub use queue::{ConcurrentSequencer, PendingQueue};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoreError {
    #[error("bid must be a finite non-negative number, got {0}")]
    NegativeBid(f64),
    #[error("arrival time must be a finite non-negative number, got {0}")]
    NegativeTime(f64),
    #[error("invalid score parameters: g={g}, c={c} (both must be finite and > 0)")]
    InvalidParams { g: f64, c: f64 },
    #[error("transaction id {0:?} is already in the queue")]
    DuplicateId(String),
    #[error("clock moved backwards: last emit at {last} s, now {now} s")]
    TimeRegression { last: f64, now: f64 },
}

/// Timestamp in integer microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Micros(pub i64);

impl Micros {
    pub const ZERO: Micros = Micros(0);

    pub fn from_secs_f64(secs: f64) -> Self {
        Micros((secs * 1e6).round() as i64)
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1e6
    }

    pub fn saturating_add(self, other: Micros) -> Micros {
        Micros(self.0.saturating_add(other.0))
    }
}

impl fmt::Display for Micros {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}s", self.as_secs_f64())
    }
}

/// Parameters of the time-boost function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreParams {
    /// Maximum time boost in seconds.
    pub g: f64,
    /// Bid at which half of the maximum boost is reached.
    pub c: f64,
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams { g: 0.5, c: 1.0 }
    }
}

impl ScoreParams {
    pub fn new(g: f64, c: f64) -> Result<Self, ScoreError> {
        let p = ScoreParams { g, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ScoreError> {
        if !(self.g.is_finite() && self.g > 0.0 && self.c.is_finite() && self.c > 0.0) {
            return Err(ScoreError::InvalidParams { g: self.g, c: self.c });
        }
        Ok(())
    }
}

/// A transaction as seen by the sequencer.
#[derive(Debug, Clone, PartialEq)]
pub struct Transaction {
    id: String,
    t: Micros,
    bid: f64,
    payload: Vec<u8>,
}

impl Transaction {
    /// Builds a transaction from an arrival time in seconds.
    pub fn new(id: impl Into<String>, t_secs: f64, bid: f64, payload: Vec<u8>) -> Result<Self, ScoreError> {
        if !t_secs.is_finite() || t_secs < 0.0 {
            return Err(ScoreError::NegativeTime(t_secs));
        }
        Self::at(id, Micros::from_secs_f64(t_secs), bid, payload)
    }

    pub fn at(id: impl Into<String>, t: Micros, bid: f64, payload: Vec<u8>) -> Result<Self, ScoreError> {
        if !bid.is_finite() || bid < 0.0 {
            return Err(ScoreError::NegativeBid(bid));
        }
        if t.0 < 0 {
            return Err(ScoreError::NegativeTime(t.as_secs_f64()));
        }
        Ok(Transaction { id: id.into(), t, bid, payload })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn arrival(&self) -> Micros {
        self.t
    }

    pub fn arrival_secs(&self) -> f64 {
        self.t.as_secs_f64()
    }

    pub fn bid(&self) -> f64 {
        self.bid
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }
}

/// Score of a transaction, in seconds. Higher is better.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Score(pub f64);

impl Score {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Time boost `g*b/(b+c)` purchased by bid `b`.
pub fn time_boost(bid: f64, params: &ScoreParams) -> Result<f64, ScoreError> {
    if !bid.is_finite() || bid < 0.0 {
        return Err(ScoreError::NegativeBid(bid));
    }
    Ok(boost_unchecked(bid, params))
}

pub(crate) fn boost_unchecked(bid: f64, params: &ScoreParams) -> f64 {
    params.g * bid / (bid + params.c)
}

pub fn score(tx: &Transaction, params: &ScoreParams) -> Score {
    Score(boost_unchecked(tx.bid, params) - tx.arrival_secs())
}

/// Earliest time at which `tx` can be emitted without a later arrival
/// outscoring it. Mathematically `t + (g - time_boost(b))`; computed as
/// `g - score` so that it is exactly monotone in the score.
pub fn release_time(tx: &Transaction, params: &ScoreParams) -> f64 {
    params.g - score(tx, params).0
}

/// Priority comparison: `Less` means `a` goes first.
///
/// Decreasing score, then ascending arrival time, then ascending id.
pub fn priority_cmp(a: &Transaction, b: &Transaction, params: &ScoreParams) -> Ordering {
    let sa = score(a, params).0;
    let sb = score(b, params).0;
    sb.total_cmp(&sa).then_with(|| a.t.cmp(&b.t)).then_with(|| a.id.cmp(&b.id))
}

/// Orders a finite set of transactions by decreasing score.
pub fn order(txs: &[Transaction], params: &ScoreParams) -> Vec<Transaction> {
    let mut out = txs.to_vec();
    out.sort_by(|a, b| priority_cmp(a, b, params));
    out
}
