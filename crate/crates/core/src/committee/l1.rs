//! Minimal L1 contract: delayed inbox, batch posting and forced inclusion.

use thiserror::Error;

use super::block::Batch;
use super::crypto::verify_signature;
use super::plain::submit_delayed;
use super::types::{Digest, Hasher, SequencerId};

/// What the state machine may ask of L1. Answers never change once given.
pub trait L1View {
    fn forced_inclusion(&self, txid: &Digest) -> Option<ForcedInclusion>;
    fn delayed_message(&self, index: u64) -> Option<Vec<u8>>;
}

/// A block placed on the sequencer chain directly by L1.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedInclusion {
    pub txid: Digest,
    pub l1_block: u64,
    /// Sequencer-chain height of the forced block.
    pub height: u64,
    pub delayed_count: u64,
    pub index: u64,
    pub data: Vec<u8>,
    /// Whole seconds.
    pub timestamp: u64,
}

impl ForcedInclusion {
    /// Hash under which the forced message circulates as a transaction.
    pub fn tx_hash(&self) -> Digest {
        submit_delayed(self.index, &self.data).hash()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignedBatch {
    pub epoch: u64,
    pub batch: Batch,
    pub signatures: Vec<(SequencerId, Vec<u8>)>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum L1Reject {
    #[error("batch block number {got} is not above the last posted {last}")]
    StaleBlockNumber { got: u64, last: u64 },
    #[error("delayed count {got} is below the last posted {last}")]
    DelayedCountDecreased { got: u64, last: u64 },
    #[error("batch carries {valid} valid signatures, need {needed}")]
    InsufficientSignatures { valid: usize, needed: usize },
    #[error("batch from epoch {epoch} predates forced inclusion at L1 block {min}")]
    StaleEpoch { epoch: u64, min: u64 },
    #[error("no delayed message with index {0}")]
    UnknownDelayed(u64),
    #[error("delayed message {index} was already consumed (count {count})")]
    AlreadyConsumed { index: u64, count: u64 },
    #[error("delayed message {index} is not the oldest unconsumed ({oldest})")]
    NotOldest { index: u64, oldest: u64 },
    #[error("delayed message is {age:.3}s old, threshold is {threshold:.3}s")]
    TooYoung { age: f64, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq)]
struct DelayedEntry {
    data: Vec<u8>,
    enqueued_at: f64,
}

#[derive(Debug, Clone)]
pub struct L1Stub {
    n: usize,
    f: usize,
    force_age: f64,
    block_number: u64,
    delayed: Vec<DelayedEntry>,
    last_block_number: Option<u64>,
    last_delayed_count: u64,
    last_timestamp: u64,
    min_epoch: u64,
    posted: Vec<Batch>,
    forced: Vec<ForcedInclusion>,
}

impl L1Stub {
    pub fn new(n: usize, f: usize, force_age: f64) -> Self {
        L1Stub {
            n,
            f,
            force_age,
            block_number: 0,
            delayed: Vec::new(),
            last_block_number: None,
            last_delayed_count: 0,
            last_timestamp: 0,
            min_epoch: 0,
            posted: Vec::new(),
            forced: Vec::new(),
        }
    }

    pub fn block_number(&self) -> u64 {
        self.block_number
    }

    /// Advances the L1 block number.
    pub fn finalize(&mut self) -> u64 {
        self.block_number += 1;
        self.block_number
    }

    pub fn enqueue_delayed(&mut self, data: Vec<u8>, now: f64) -> u64 {
        self.delayed.push(DelayedEntry { data, enqueued_at: now });
        self.finalize();
        (self.delayed.len() - 1) as u64
    }

    pub fn delayed_len(&self) -> u64 {
        self.delayed.len() as u64
    }

    pub fn last_posted_block(&self) -> Option<u64> {
        self.last_block_number
    }

    pub fn consumed_delayed(&self) -> u64 {
        self.last_delayed_count
    }

    pub fn posted(&self) -> &[Batch] {
        &self.posted
    }

    pub fn forced(&self) -> &[ForcedInclusion] {
        &self.forced
    }

    pub fn post_batch(&mut self, signed: &SignedBatch) -> Result<(), L1Reject> {
        if signed.epoch < self.min_epoch {
            return Err(L1Reject::StaleEpoch { epoch: signed.epoch, min: self.min_epoch });
        }
        let digest = signed.batch.digest();
        let mut signers: Vec<SequencerId> = signed
            .signatures
            .iter()
            .filter(|(id, sig)| (*id as usize) < self.n && verify_signature(*id, &digest, sig))
            .map(|(id, _)| *id)
            .collect();
        signers.sort_unstable();
        signers.dedup();
        if signers.len() < self.f + 1 {
            return Err(L1Reject::InsufficientSignatures { valid: signers.len(), needed: self.f + 1 });
        }
        let h = &signed.batch.header;
        if let Some(last) = self.last_block_number {
            if h.block_number <= last {
                return Err(L1Reject::StaleBlockNumber { got: h.block_number, last });
            }
        }
        if h.delayed_count < self.last_delayed_count {
            return Err(L1Reject::DelayedCountDecreased { got: h.delayed_count, last: self.last_delayed_count });
        }
        self.last_block_number = Some(h.block_number);
        self.last_delayed_count = h.delayed_count;
        self.last_timestamp = self.last_timestamp.max(h.timestamp);
        self.posted.push(signed.batch.clone());
        self.finalize();
        Ok(())
    }

    /// Forces the oldest unconsumed delayed message onto the sequencer chain.
    pub fn force_include(&mut self, index: u64, now: f64) -> Result<ForcedInclusion, L1Reject> {
        let entry = self.delayed.get(index as usize).ok_or(L1Reject::UnknownDelayed(index))?;
        if index < self.last_delayed_count {
            return Err(L1Reject::AlreadyConsumed { index, count: self.last_delayed_count });
        }
        if index > self.last_delayed_count {
            return Err(L1Reject::NotOldest { index, oldest: self.last_delayed_count });
        }
        let age = now - entry.enqueued_at;
        if age < self.force_age {
            return Err(L1Reject::TooYoung { age, threshold: self.force_age });
        }
        let data = entry.data.clone();
        let l1_block = self.finalize();
        let mut h = Hasher::new();
        h.bytes(b"force").u64(l1_block).u64(index);
        let forced = ForcedInclusion {
            txid: h.finish(),
            l1_block,
            height: self.last_block_number.map_or(0, |b| b + 1),
            delayed_count: index + 1,
            index,
            data,
            timestamp: self.last_timestamp.max(now.max(0.0).floor() as u64),
        };
        self.last_block_number = Some(forced.height);
        self.last_delayed_count = forced.delayed_count;
        self.last_timestamp = forced.timestamp;
        self.min_epoch = l1_block;
        self.forced.push(forced.clone());
        Ok(forced)
    }
}

impl L1View for L1Stub {
    fn forced_inclusion(&self, txid: &Digest) -> Option<ForcedInclusion> {
        self.forced.iter().find(|f| f.txid == *txid).cloned()
    }

    fn delayed_message(&self, index: u64) -> Option<Vec<u8>> {
        self.delayed.get(index as usize).map(|e| e.data.clone())
    }
}
