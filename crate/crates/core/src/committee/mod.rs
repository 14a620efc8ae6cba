//! The decentralized sequencer committee.
//!
//! [`SequencerState`] is a pure function of the broadcast messages it has
//! applied. [`Replica`] wraps it with the local, clock-driven behavior of
//! one sequencer: stamping, releasing shares, signing and recovering.

pub mod block;
pub mod crypto;
pub mod l1;
pub mod merkle;
pub mod plain;
pub mod replica;
pub mod state;
pub mod types;
pub mod wire;

pub use block::{Batch, BatchBuilder, BatchHeader, BlockContent, BlockEntry, BlockError, SequencerBlock};
pub use crypto::{MockThreshold, ThresholdScheme};
pub use l1::{ForcedInclusion, L1Reject, L1Stub, L1View, SignedBatch};
pub use merkle::MerkleLog;
pub use plain::{submit_delayed, submit_user, Plaintext};
pub use replica::{Behavior, FetchRequest, Replica, ReplicaOutput};
pub use state::{consensus_timestamp, DiscardReason, Ignored, Outcome, SequencerState, StateEvent};
pub use types::{Digest, EncTx, SequencerId, TimestampTriple};
pub use wire::{BroadcastMsg, WireError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::score::{ScoreError, ScoreParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommitteeError {
    #[error("committee size must be odd, got N={0}")]
    EvenCommittee(usize),
    #[error("fault bound violated: need 3F < N, got N={n}, F={f}")]
    TooManyFaults { n: usize, f: usize },
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("invalid batch parameters: window {window} s, max {max_bytes} bytes")]
    InvalidBatching { window: f64, max_bytes: usize },
}

fn default_window() -> f64 {
    60.0
}

fn default_max_bytes() -> usize {
    64 * 1024
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommitteeParams {
    pub n: usize,
    pub f: usize,
    #[serde(default)]
    pub score: ScoreParams,
    /// Seconds of `τ′` a batch may span.
    #[serde(default = "default_window")]
    pub batch_window: f64,
    /// Compressed size cap of a batch body.
    #[serde(default = "default_max_bytes")]
    pub max_batch_bytes: usize,
}

impl CommitteeParams {
    pub fn new(n: usize, f: usize, score: ScoreParams) -> Self {
        CommitteeParams { n, f, score, batch_window: default_window(), max_batch_bytes: default_max_bytes() }
    }

    pub fn validate(&self) -> Result<(), CommitteeError> {
        if self.n.is_multiple_of(2) {
            return Err(CommitteeError::EvenCommittee(self.n));
        }
        if 3 * self.f >= self.n {
            return Err(CommitteeError::TooManyFaults { n: self.n, f: self.f });
        }
        self.score.validate()?;
        if !(self.batch_window.is_finite() && self.batch_window > 0.0) || self.max_batch_bytes == 0 {
            return Err(CommitteeError::InvalidBatching { window: self.batch_window, max_bytes: self.max_batch_bytes });
        }
        Ok(())
    }

    /// `N - F`.
    pub fn quorum(&self) -> usize {
        self.n - self.f
    }

    /// `F + 1`.
    pub fn threshold(&self) -> usize {
        self.f + 1
    }
}
