//! The replicated sequencer state and its deterministic transition function.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::block::{Batch, BatchBuilder, BlockContent, BlockEntry, SequencerBlock};
use super::crypto::{verify_signature, MockThreshold, ThresholdScheme};
use super::l1::{ForcedInclusion, L1View};
use super::merkle::MerkleLog;
use super::plain::Plaintext;
use super::types::{Digest, EncTx, Hasher, SequencerId, TimestampTriple};
use super::wire::BroadcastMsg;
use super::{CommitteeError, CommitteeParams};
use crate::score::boost_unchecked;

/// Why a delivered message left the state untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ignored {
    WrongEpoch,
    SenderMismatch,
    StaleTimestamp,
    InvalidFee,
    UnknownTx,
    Unresolved,
    TauMismatch,
    NotWilling,
    BadShare,
    Duplicate,
    UnknownBlock,
    BadSignature,
    OldEpoch,
    UnverifiedEpoch,
}

impl fmt::Display for Ignored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiscardReason {
    Malformed,
    FeeMismatch { declared: f64, actual: f64 },
    UnknownDelayed(u64),
    DelayedConsumed(u64),
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscardReason::Malformed => f.write_str("malformed plaintext"),
            DiscardReason::FeeMismatch { declared, actual } => {
                write!(f, "declared fee {declared} but transaction pays {actual}")
            }
            DiscardReason::UnknownDelayed(i) => write!(f, "delayed message {i} does not match the L1 inbox"),
            DiscardReason::DelayedConsumed(i) => write!(f, "delayed message {i} already consumed"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Included { height: u64 },
    Discarded(DiscardReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PendingRecord {
    pub tx: EncTx,
    pub stamps: BTreeMap<SequencerId, TimestampTriple>,
    pub consensus: Option<TimestampTriple>,
    /// Whether all `N` stamps were present when the consensus timestamp was fixed.
    pub complete_at_resolution: bool,
    pub tau_prime: Option<f64>,
    pub shares: BTreeMap<SequencerId, Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainBlock {
    pub block: SequencerBlock,
    pub tau_prime: f64,
    pub tx_hash: Digest,
    pub forced: bool,
    pub epoch: u64,
    pub signers: BTreeSet<SequencerId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchRecord {
    pub batch: Batch,
    pub epoch: u64,
    pub signatures: BTreeMap<SequencerId, Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrphanTx {
    pub tx: EncTx,
    pub stamps: BTreeMap<SequencerId, TimestampTriple>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochChange {
    pub epoch: u64,
    pub forced: ForcedInclusion,
    pub orphaned_blocks: usize,
    pub orphan_txs: Vec<OrphanTx>,
}

/// Observable effects of a transition, drained by the owner.
#[derive(Debug, Clone, PartialEq)]
pub enum StateEvent {
    Resolved { hash: Digest, tau: TimestampTriple, tau_prime: f64, complete: bool },
    Included { hash: Digest, height: u64, tau: TimestampTriple, tau_prime: f64, fee: f64, delayed: bool },
    Discarded { hash: Digest, reason: DiscardReason },
    BlockFinal { height: u64 },
    BatchClosed { block_number: u64 },
    BatchFinal { block_number: u64 },
    EpochStarted { epoch: u64, forced_height: u64, orphaned_blocks: usize, orphan_txs: usize },
}

/// Ordering key `(τ′, H)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, Digest);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then_with(|| self.1.cmp(&other.1))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Consensus timestamp of a transaction, if it is already determined.
///
/// `τ` is the stamp with exactly `(N-1)/2` stamps below it. It is final
/// when every sequencer that has not stamped already has a maximum
/// timestamp above `τ`, or when at least `N-F` sequencers have a maximum
/// timestamp at or above `τ`.
pub fn consensus_timestamp(
    stamps: &BTreeMap<SequencerId, TimestampTriple>,
    max_ts: &[Option<TimestampTriple>],
    f: usize,
) -> Option<TimestampTriple> {
    let n = max_ts.len();
    let k = (n - 1) / 2;
    let mut sorted: Vec<TimestampTriple> = stamps.values().copied().collect();
    if sorted.len() <= k {
        return None;
    }
    sorted.sort_unstable();
    let tau = sorted[k];
    let silent_above =
        (0..n as SequencerId).filter(|i| !stamps.contains_key(i)).all(|i| max_ts[i as usize] > Some(tau));
    let caught_up = max_ts.iter().filter(|m| **m >= Some(tau)).count() >= n - f;
    (silent_above || caught_up).then_some(tau)
}

#[derive(Debug, Clone)]
pub struct SequencerState {
    params: CommitteeParams,
    epoch: u64,
    max_ts: Vec<Option<TimestampTriple>>,
    pending: BTreeMap<Digest, PendingRecord>,
    queue: BTreeSet<Key>,
    done: BTreeMap<Digest, Outcome>,
    chain: Vec<ChainBlock>,
    merkle: MerkleLog,
    delayed_count: u64,
    batcher: BatchBuilder,
    batches: Vec<BatchRecord>,
    last_epoch: Option<EpochChange>,
    events: Vec<StateEvent>,
}

impl PartialEq for SequencerState {
    fn eq(&self, other: &Self) -> bool {
        self.digest() == other.digest()
    }
}

impl SequencerState {
    pub fn new(params: CommitteeParams) -> Result<Self, CommitteeError> {
        params.validate()?;
        Ok(SequencerState {
            epoch: 0,
            max_ts: vec![None; params.n],
            pending: BTreeMap::new(),
            queue: BTreeSet::new(),
            done: BTreeMap::new(),
            chain: Vec::new(),
            merkle: MerkleLog::new(),
            delayed_count: 0,
            batcher: BatchBuilder::new(params.batch_window, params.max_batch_bytes),
            batches: Vec::new(),
            last_epoch: None,
            events: Vec::new(),
            params,
        })
    }

    pub fn params(&self) -> &CommitteeParams {
        &self.params
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn max_ts(&self) -> &[Option<TimestampTriple>] {
        &self.max_ts
    }

    pub fn pending(&self) -> &BTreeMap<Digest, PendingRecord> {
        &self.pending
    }

    pub fn outcome(&self, hash: &Digest) -> Option<&Outcome> {
        self.done.get(hash)
    }

    pub fn outcomes(&self) -> &BTreeMap<Digest, Outcome> {
        &self.done
    }

    pub fn is_finished(&self, hash: &Digest) -> bool {
        self.done.contains_key(hash)
    }

    pub fn chain(&self) -> &[ChainBlock] {
        &self.chain
    }

    pub fn merkle(&self) -> &MerkleLog {
        &self.merkle
    }

    pub fn batches(&self) -> &[BatchRecord] {
        &self.batches
    }

    pub fn last_epoch(&self) -> Option<&EpochChange> {
        self.last_epoch.as_ref()
    }

    /// True while some transaction or batch still waits on clocks advancing.
    pub fn has_work(&self) -> bool {
        !self.pending.is_empty() || !self.batcher.is_empty()
    }

    pub fn take_events(&mut self) -> Vec<StateEvent> {
        std::mem::take(&mut self.events)
    }

    fn g(&self) -> f64 {
        self.params.score.g
    }

    fn boost(&self, fee: f64) -> f64 {
        boost_unchecked(fee, &self.params.score)
    }

    /// Adjusted consensus timestamp `τ − π(P)` in seconds.
    pub fn adjusted_timestamp(&self, tau: TimestampTriple, fee: f64) -> f64 {
        tau.secs() - self.boost(fee)
    }

    /// Applies one broadcast message delivered in global order.
    pub fn apply(&mut self, sender: SequencerId, msg: &BroadcastMsg, l1: &dyn L1View) -> Result<(), Ignored> {
        if let Some(claimed) = msg.claimed_sender() {
            if claimed != sender || claimed as usize >= self.params.n {
                return Err(Ignored::SenderMismatch);
            }
        }
        match msg {
            BroadcastMsg::LocalTimestamp { epoch, id, tx, ts } => {
                if *epoch != self.epoch {
                    return Err(Ignored::WrongEpoch);
                }
                if ts.id != *id {
                    return Err(Ignored::SenderMismatch);
                }
                if !(tx.fee.is_finite() && tx.fee >= 0.0) {
                    return Err(Ignored::InvalidFee);
                }
                self.bump(*id, *ts)?;
                let h = tx.hash();
                if !self.done.contains_key(&h) {
                    let rec = self.pending.entry(h).or_insert_with(|| PendingRecord {
                        tx: tx.clone(),
                        stamps: BTreeMap::new(),
                        consensus: None,
                        complete_at_resolution: false,
                        tau_prime: None,
                        shares: BTreeMap::new(),
                    });
                    rec.stamps.entry(*id).or_insert(*ts);
                }
                self.progress(l1);
                Ok(())
            }
            BroadcastMsg::Heartbeat { epoch, id, ts } => {
                if *epoch != self.epoch {
                    return Err(Ignored::WrongEpoch);
                }
                if ts.id != *id {
                    return Err(Ignored::SenderMismatch);
                }
                self.bump(*id, *ts)?;
                self.progress(l1);
                Ok(())
            }
            BroadcastMsg::DecryptionShare { epoch, id, hash, share, tau_prime } => {
                if *epoch != self.epoch {
                    return Err(Ignored::WrongEpoch);
                }
                let rec = self.pending.get(hash).ok_or(Ignored::UnknownTx)?;
                let tp = rec.tau_prime.ok_or(Ignored::Unresolved)?;
                if tp.to_bits() != tau_prime.to_bits() {
                    return Err(Ignored::TauMismatch);
                }
                if rec.shares.contains_key(id) {
                    return Err(Ignored::Duplicate);
                }
                if !self.eligible(tp, *hash) {
                    return Err(Ignored::NotWilling);
                }
                if !MockThreshold.verify_share(*id, hash, share) {
                    return Err(Ignored::BadShare);
                }
                self.pending.get_mut(hash).expect("checked above").shares.insert(*id, share.clone());
                self.progress(l1);
                Ok(())
            }
            BroadcastMsg::BlockSignature { epoch, id, height, digest, sig } => {
                if *epoch != self.epoch {
                    return Err(Ignored::WrongEpoch);
                }
                let f = self.params.f;
                let cb = self.chain.get_mut(*height as usize).ok_or(Ignored::UnknownBlock)?;
                if cb.forced || cb.block.digest() != *digest {
                    return Err(Ignored::UnknownBlock);
                }
                if !verify_signature(*id, digest, sig) {
                    return Err(Ignored::BadSignature);
                }
                if !cb.signers.insert(*id) {
                    return Err(Ignored::Duplicate);
                }
                if cb.signers.len() == f + 1 {
                    self.events.push(StateEvent::BlockFinal { height: *height });
                }
                Ok(())
            }
            BroadcastMsg::BatchSignature { epoch, id, block_number, digest, sig } => {
                if *epoch != self.epoch {
                    return Err(Ignored::WrongEpoch);
                }
                let f = self.params.f;
                let rec = self
                    .batches
                    .iter_mut()
                    .rev()
                    .find(|b| b.batch.header.block_number == *block_number && b.batch.digest() == *digest)
                    .ok_or(Ignored::UnknownBlock)?;
                if !verify_signature(*id, digest, sig) {
                    return Err(Ignored::BadSignature);
                }
                if rec.signatures.insert(*id, sig.clone()).is_some() {
                    return Err(Ignored::Duplicate);
                }
                if rec.signatures.len() == f + 1 {
                    self.events.push(StateEvent::BatchFinal { block_number: *block_number });
                }
                Ok(())
            }
            BroadcastMsg::NewEpoch { b, txid } => self.start_new_epoch(*b, txid, l1),
            BroadcastMsg::Recover { .. } | BroadcastMsg::StateHash { .. } => Ok(()),
        }
    }

    fn bump(&mut self, id: SequencerId, ts: TimestampTriple) -> Result<(), Ignored> {
        let slot = &mut self.max_ts[id as usize];
        if Some(ts) <= *slot {
            return Err(Ignored::StaleTimestamp);
        }
        *slot = Some(ts);
        Ok(())
    }

    /// Whether `N-F` sequencers have a maximum timestamp at or past `τ′ + g`.
    pub fn share_condition(&self, tau_prime: f64) -> bool {
        let bar = tau_prime + self.g();
        self.max_ts.iter().filter(|m| m.is_some_and(|m| m.secs() >= bar)).count() >= self.params.n - self.params.f
    }

    /// Lowest adjusted timestamp an unresolved transaction can still end up with.
    fn lower_bound(&self, rec: &PendingRecord) -> f64 {
        let k = (self.params.n - 1) / 2;
        let mut vals: Vec<f64> = (0..self.params.n)
            .map(|i| match rec.stamps.get(&(i as SequencerId)) {
                Some(s) => s.secs(),
                None => self.max_ts[i].map_or(f64::NEG_INFINITY, |m| m.secs()),
            })
            .collect();
        vals.sort_by(f64::total_cmp);
        vals[k] - self.boost(rec.tx.fee)
    }

    /// Willingness to release a resolved transaction: the share condition
    /// holds and no unresolved transaction can still be ordered before it.
    pub fn eligible(&self, tau_prime: f64, hash: Digest) -> bool {
        if !self.share_condition(tau_prime) {
            return false;
        }
        let key = Key(tau_prime, hash);
        self.pending.iter().filter(|(_, r)| r.consensus.is_none()).all(|(h, r)| key < Key(self.lower_bound(r), *h))
    }

    /// Resolved, releasable, still-encrypted transactions in `τ′` order.
    pub fn releasable(&self) -> Vec<(Digest, f64)> {
        let mut out = Vec::new();
        for key in &self.queue {
            if !self.eligible(key.0, key.1) {
                break;
            }
            out.push((key.1, key.0));
        }
        out
    }

    /// Lowest `τ′` any block not yet on the chain can have.
    fn frontier(&self) -> f64 {
        let k = (self.params.n - 1) / 2;
        let mut ms: Vec<f64> = self.max_ts.iter().map(|m| m.map_or(f64::NEG_INFINITY, |m| m.secs())).collect();
        ms.sort_by(f64::total_cmp);
        let mut lo = ms[k] - self.g();
        if let Some(first) = self.queue.first() {
            lo = lo.min(first.0);
        }
        for rec in self.pending.values().filter(|r| r.consensus.is_none()) {
            lo = lo.min(self.lower_bound(rec));
        }
        lo
    }

    fn progress(&mut self, l1: &dyn L1View) {
        let (n, f) = (self.params.n, self.params.f);
        let unresolved: Vec<Digest> =
            self.pending.iter().filter(|(_, r)| r.consensus.is_none()).map(|(h, _)| *h).collect();
        for h in unresolved {
            let rec = &self.pending[&h];
            if let Some(tau) = consensus_timestamp(&rec.stamps, &self.max_ts, f) {
                let tp = self.adjusted_timestamp(tau, rec.tx.fee);
                let complete = rec.stamps.len() == n;
                let rec = self.pending.get_mut(&h).expect("listed above");
                rec.consensus = Some(tau);
                rec.tau_prime = Some(tp);
                rec.complete_at_resolution = complete;
                self.queue.insert(Key(tp, h));
                self.events.push(StateEvent::Resolved { hash: h, tau, tau_prime: tp, complete });
            }
        }
        while let Some(&key) = self.queue.first() {
            if !self.eligible(key.0, key.1) {
                break;
            }
            let rec = &self.pending[&key.1];
            let shares: Vec<(SequencerId, Vec<u8>)> = rec.shares.iter().map(|(i, s)| (*i, s.clone())).collect();
            let Some(plain) = MockThreshold.combine(&rec.tx.ciphertext, &key.1, &shares, f + 1) else {
                break;
            };
            self.queue.pop_first();
            let rec = self.pending.remove(&key.1).expect("queued records are pending");
            let tau = rec.consensus.expect("queued records are resolved");
            match self.validate(&plain, rec.tx.fee, l1) {
                Ok((content, delayed_count)) => {
                    let delayed = matches!(content, BlockContent::Delayed { .. });
                    let height = self.append_block(content, delayed_count, key.0, key.1, false, None);
                    self.done.insert(key.1, Outcome::Included { height });
                    self.events.push(StateEvent::Included {
                        hash: key.1,
                        height,
                        tau,
                        tau_prime: key.0,
                        fee: rec.tx.fee,
                        delayed,
                    });
                }
                Err(reason) => {
                    self.done.insert(key.1, Outcome::Discarded(reason.clone()));
                    self.events.push(StateEvent::Discarded { hash: key.1, reason });
                }
            }
        }
        if let Some(first) = self.batcher.first_tau() {
            if self.frontier() - first > self.batcher.window() {
                self.close_batch();
            }
        }
    }

    fn validate(&self, plain: &[u8], declared: f64, l1: &dyn L1View) -> Result<(BlockContent, u64), DiscardReason> {
        match Plaintext::decode(plain).ok_or(DiscardReason::Malformed)? {
            Plaintext::User { fee, .. } => {
                if fee != declared {
                    return Err(DiscardReason::FeeMismatch { declared, actual: fee });
                }
                Ok((BlockContent::Tx(plain.to_vec()), self.delayed_count))
            }
            Plaintext::Delayed { index, body } => {
                if declared != 0.0 || l1.delayed_message(index).as_deref() != Some(body.as_slice()) {
                    return Err(DiscardReason::UnknownDelayed(index));
                }
                if index < self.delayed_count {
                    return Err(DiscardReason::DelayedConsumed(index));
                }
                Ok((BlockContent::Delayed { index }, index + 1))
            }
        }
    }

    /// Appends a block; the timestamp is `floor(τ′ + g)` unless `timestamp` is given,
    /// and never earlier than the previous block's.
    fn append_block(
        &mut self,
        content: BlockContent,
        delayed_count: u64,
        tau_prime: f64,
        tx_hash: Digest,
        forced: bool,
        timestamp: Option<u64>,
    ) -> u64 {
        let height = self.chain.len() as u64;
        let prev_ts = self.chain.last().map_or(0, |b| b.block.timestamp());
        let ts = timestamp.unwrap_or_else(|| block_timestamp(tau_prime, self.g())).max(prev_ts);
        let entry = BlockEntry { timestamp: ts, content };
        let root = self.merkle.append(&SequencerBlock::leaf_data(height, delayed_count, &entry));
        let block = SequencerBlock { height, delayed_count, entry, merkle_root: root };
        self.delayed_count = delayed_count;
        if let Some(batch) = self.batcher.push(&block, tau_prime) {
            self.record_batch(batch);
        }
        self.chain.push(ChainBlock { block, tau_prime, tx_hash, forced, epoch: self.epoch, signers: BTreeSet::new() });
        height
    }

    fn record_batch(&mut self, batch: Batch) {
        self.events.push(StateEvent::BatchClosed { block_number: batch.header.block_number });
        self.batches.push(BatchRecord { batch, epoch: self.epoch, signatures: BTreeMap::new() });
    }

    fn close_batch(&mut self) {
        if let Some(batch) = self.batcher.close() {
            self.record_batch(batch);
        }
    }

    fn start_new_epoch(&mut self, b: u64, txid: &Digest, l1: &dyn L1View) -> Result<(), Ignored> {
        if b <= self.epoch {
            return Err(Ignored::OldEpoch);
        }
        let forced = l1.forced_inclusion(txid).ok_or(Ignored::UnverifiedEpoch)?;
        if forced.l1_block != b || forced.height > self.chain.len() as u64 {
            return Err(Ignored::UnverifiedEpoch);
        }
        let forced_hash = forced.tx_hash();
        let orphaned = self.chain.split_off(forced.height as usize);
        self.merkle.truncate(forced.height);
        self.delayed_count = self.chain.last().map_or(0, |b| b.block.delayed_count);

        let orphan_txs: Vec<OrphanTx> = std::mem::take(&mut self.pending)
            .into_iter()
            .filter(|(h, _)| *h != forced_hash)
            .map(|(_, r)| OrphanTx { tx: r.tx, stamps: r.stamps })
            .collect();
        self.queue.clear();
        self.epoch = b;

        // Batches wholly below the forced block survive; the rest is rebuilt.
        self.batches.retain(|r| r.batch.header.block_number < forced.height);
        let rebuild_from = self.batches.last().map_or(0, |r| r.batch.header.block_number + 1);
        self.batcher = BatchBuilder::new(self.params.batch_window, self.params.max_batch_bytes);
        for cb in &self.chain[rebuild_from as usize..] {
            if let Some(batch) = self.batcher.push(&cb.block, cb.tau_prime) {
                self.events.push(StateEvent::BatchClosed { block_number: batch.header.block_number });
                self.batches.push(BatchRecord { batch, epoch: b, signatures: BTreeMap::new() });
            }
        }

        let ts = forced.timestamp;
        let height = self.append_block(
            BlockContent::Delayed { index: forced.index },
            forced.delayed_count,
            ts as f64,
            forced_hash,
            true,
            Some(ts),
        );
        self.done.insert(forced_hash, Outcome::Included { height });
        let mut recreated = 0;
        for ob in orphaned.into_iter().filter(|ob| ob.tx_hash != forced_hash) {
            let dc = ob.block.delayed_count.max(self.delayed_count);
            let h = self.append_block(ob.block.entry.content, dc, ob.tau_prime, ob.tx_hash, ob.forced, Some(ts));
            self.done.insert(ob.tx_hash, Outcome::Included { height: h });
            recreated += 1;
        }
        self.events.push(StateEvent::EpochStarted {
            epoch: b,
            forced_height: forced.height,
            orphaned_blocks: recreated,
            orphan_txs: orphan_txs.len(),
        });
        self.last_epoch = Some(EpochChange { epoch: b, forced, orphaned_blocks: recreated, orphan_txs });
        Ok(())
    }

    /// Canonical hash of the whole replicated state.
    pub fn digest(&self) -> Digest {
        let p = &self.params;
        let mut h = Hasher::new();
        h.bytes(b"sequencer-state").u64(p.n as u64).u64(p.f as u64).f64(p.score.g).f64(p.score.c).u64(self.epoch);
        for m in &self.max_ts {
            hash_opt_triple(&mut h, m);
        }
        h.u64(self.pending.len() as u64);
        for (d, r) in &self.pending {
            h.digest(d).u64(r.stamps.len() as u64);
            for (i, s) in &r.stamps {
                h.u32(*i);
                hash_opt_triple(&mut h, &Some(*s));
            }
            hash_opt_triple(&mut h, &r.consensus);
            h.u8(r.complete_at_resolution as u8).f64(r.tau_prime.unwrap_or(f64::NAN)).u64(r.shares.len() as u64);
            for (i, s) in &r.shares {
                h.u32(*i).field(s);
            }
        }
        h.u64(self.done.len() as u64);
        for (d, o) in &self.done {
            h.digest(d);
            match o {
                Outcome::Included { height } => h.u8(0).u64(*height),
                Outcome::Discarded(r) => h.u8(1).field(r.to_string().as_bytes()),
            };
        }
        h.u64(self.chain.len() as u64);
        for cb in &self.chain {
            h.digest(&cb.block.digest()).f64(cb.tau_prime).digest(&cb.tx_hash).u8(cb.forced as u8).u64(cb.epoch);
            h.u64(cb.signers.len() as u64);
            for s in &cb.signers {
                h.u32(*s);
            }
        }
        h.digest(&self.merkle.root()).u64(self.delayed_count);
        self.batcher.hash_into(&mut h);
        h.u64(self.batches.len() as u64);
        for r in &self.batches {
            h.digest(&r.batch.digest()).u64(r.epoch).u64(r.signatures.len() as u64);
            for i in r.signatures.keys() {
                h.u32(*i);
            }
        }
        match &self.last_epoch {
            Some(e) => h.u8(1).u64(e.epoch).digest(&e.forced.txid).u64(e.orphan_txs.len() as u64),
            None => h.u8(0),
        };
        h.finish()
    }
}

fn hash_opt_triple(h: &mut Hasher, t: &Option<TimestampTriple>) {
    match t {
        Some(t) => h.u8(1).i64(t.t.0).u32(t.id).u64(t.seq),
        None => h.u8(0),
    };
}

/// `floor(τ′ + g)` in whole seconds, clamped at zero.
pub fn block_timestamp(tau_prime: f64, g: f64) -> u64 {
    (tau_prime + g).floor().max(0.0) as u64
}
