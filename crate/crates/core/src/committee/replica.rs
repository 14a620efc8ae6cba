//! One sequencer's local behavior around the shared state machine.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::crypto::{sign, MockThreshold, ThresholdScheme};
use super::l1::L1View;
use super::state::{OrphanTx, SequencerState};
use super::types::{Digest, EncTx, SequencerId, TimestampTriple};
use super::wire::BroadcastMsg;
use super::{CommitteeError, CommitteeParams};
use crate::score::Micros;

/// How a replica deviates from the protocol, if at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Behavior {
    #[default]
    Honest,
    /// Sends nothing and processes nothing.
    Crashed,
    /// Follows the state but never broadcasts.
    Silent,
    /// Stamps everything at `floor` seconds, so its maximum timestamp never passes it.
    LowStamper { floor: f64 },
    /// Honest except that it withholds block and batch signatures.
    NonSigner,
}

impl Behavior {
    pub fn is_honest(&self) -> bool {
        matches!(self, Behavior::Honest)
    }

    pub fn stamps(&self) -> bool {
        matches!(self, Behavior::Honest | Behavior::LowStamper { .. } | Behavior::NonSigner)
    }

    pub fn signs(&self) -> bool {
        matches!(self, Behavior::Honest | Behavior::LowStamper { .. })
    }
}

/// Request to fetch a peer's snapshot out of band.
#[derive(Debug, Clone, PartialEq)]
pub struct FetchRequest {
    pub nonce: u64,
    pub digest: Digest,
    /// Peers that vouched for `digest` and have not been tried yet.
    pub candidates: Vec<SequencerId>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplicaOutput {
    pub broadcasts: Vec<BroadcastMsg>,
    pub fetch: Option<FetchRequest>,
}

#[derive(Debug, Clone)]
struct Recovery {
    nonce: u64,
    started: bool,
    recorded: Vec<(SequencerId, BroadcastMsg)>,
    votes: BTreeMap<Digest, BTreeSet<SequencerId>>,
    target: Option<Digest>,
    tried: BTreeSet<SequencerId>,
}

#[derive(Debug, Clone)]
pub struct Replica {
    id: SequencerId,
    behavior: Behavior,
    params: CommitteeParams,
    state: Option<SequencerState>,
    last_issued: Option<TimestampTriple>,
    issued: Vec<TimestampTriple>,
    stamped: HashSet<Digest>,
    shared: HashSet<Digest>,
    block_cursor: usize,
    batch_cursor: usize,
    seen_epoch: u64,
    paused_until: Option<Micros>,
    backlog: Vec<EncTx>,
    recovery: Option<Recovery>,
    snapshots: HashMap<(SequencerId, u64), SequencerState>,
}

impl Replica {
    pub fn new(id: SequencerId, behavior: Behavior, params: CommitteeParams) -> Result<Self, CommitteeError> {
        let state = SequencerState::new(params)?;
        Ok(Replica {
            id,
            behavior,
            params,
            state: Some(state),
            last_issued: None,
            issued: Vec::new(),
            stamped: HashSet::new(),
            shared: HashSet::new(),
            block_cursor: 0,
            batch_cursor: 0,
            seen_epoch: 0,
            paused_until: None,
            backlog: Vec::new(),
            recovery: None,
            snapshots: HashMap::new(),
        })
    }

    /// A replica with no state that must recover before it can follow along.
    pub fn cold(id: SequencerId, behavior: Behavior, params: CommitteeParams) -> Result<Self, CommitteeError> {
        let mut r = Self::new(id, behavior, params)?;
        r.state = None;
        Ok(r)
    }

    pub fn id(&self) -> SequencerId {
        self.id
    }

    pub fn behavior(&self) -> Behavior {
        self.behavior
    }

    pub fn state(&self) -> Option<&SequencerState> {
        self.state.as_ref()
    }

    pub fn state_mut(&mut self) -> Option<&mut SequencerState> {
        self.state.as_mut()
    }

    /// Every timestamp this replica has issued, in issue order.
    pub fn issued(&self) -> &[TimestampTriple] {
        &self.issued
    }

    pub fn is_recovering(&self) -> bool {
        self.recovery.is_some()
    }

    pub fn is_paused(&self) -> bool {
        self.paused_until.is_some()
    }

    /// Whether this replica still wants clock ticks to make progress.
    pub fn wants_ticks(&self) -> bool {
        self.is_paused() || self.state.as_ref().is_some_and(|s| s.has_work())
    }

    fn epoch(&self) -> u64 {
        self.state.as_ref().map_or(self.seen_epoch, |s| s.epoch())
    }

    fn stamp_time(&self, now: Micros) -> Micros {
        match self.behavior {
            Behavior::LowStamper { floor } => Micros::from_secs_f64(floor),
            _ => now,
        }
    }

    fn next_triple(&mut self, now: Micros) -> TimestampTriple {
        let ts = TimestampTriple::next_after(self.last_issued, self.id, self.stamp_time(now));
        self.last_issued = Some(ts);
        self.issued.push(ts);
        ts
    }

    fn stamp(&mut self, tx: &EncTx, now: Micros, out: &mut Vec<BroadcastMsg>) {
        if !self.behavior.stamps() {
            return;
        }
        let h = tx.hash();
        if self.stamped.contains(&h) || self.state.as_ref().is_some_and(|s| s.is_finished(&h)) {
            return;
        }
        if self.is_paused() {
            if !self.backlog.iter().any(|b| b.hash() == h) {
                self.backlog.push(tx.clone());
            }
            return;
        }
        self.stamped.insert(h);
        let ts = self.next_triple(now);
        out.push(BroadcastMsg::LocalTimestamp { epoch: self.epoch(), id: self.id, tx: tx.clone(), ts });
    }

    fn maybe_resume(&mut self, now: Micros, out: &mut Vec<BroadcastMsg>) {
        if self.paused_until.is_some_and(|p| now > p) {
            self.paused_until = None;
            for tx in std::mem::take(&mut self.backlog) {
                self.stamp(&tx, now, out);
            }
        }
    }

    /// A user hands this replica a transaction.
    pub fn on_user_tx(&mut self, tx: &EncTx, now: Micros) -> Vec<BroadcastMsg> {
        let mut out = Vec::new();
        if self.behavior != Behavior::Crashed {
            self.maybe_resume(now, &mut out);
            self.stamp(tx, now, &mut out);
        }
        out
    }

    /// Periodic clock tick: resumes after an epoch pause and advertises
    /// the local clock while work is outstanding.
    pub fn on_tick(&mut self, now: Micros) -> Vec<BroadcastMsg> {
        let mut out = Vec::new();
        if self.behavior == Behavior::Crashed || self.recovery.is_some() {
            return out;
        }
        self.maybe_resume(now, &mut out);
        let busy = self.state.as_ref().is_some_and(|s| s.has_work());
        if self.behavior.stamps() && busy && !self.is_paused() {
            let ts = self.next_triple(now);
            out.push(BroadcastMsg::Heartbeat { epoch: self.epoch(), id: self.id, ts });
        }
        out
    }

    /// Delivery of the next message in the global broadcast order.
    pub fn on_deliver(
        &mut self,
        sender: SequencerId,
        msg: &BroadcastMsg,
        now: Micros,
        l1: &dyn L1View,
    ) -> ReplicaOutput {
        let mut out = ReplicaOutput::default();
        if self.behavior == Behavior::Crashed {
            return out;
        }
        if self.recovery.is_some() {
            self.deliver_recovering(sender, msg, now, &mut out);
            return out;
        }
        let Some(st) = self.state.as_mut() else {
            return out;
        };
        let _ = st.apply(sender, msg, l1);
        if let BroadcastMsg::Recover { id: r, nonce } = msg {
            if *r != self.id {
                let snap = st.clone();
                let digest = snap.digest();
                self.snapshots.insert((*r, *nonce), snap);
                if self.behavior.stamps() {
                    out.broadcasts.push(BroadcastMsg::StateHash {
                        from: self.id,
                        recovering: *r,
                        nonce: *nonce,
                        digest,
                    });
                }
            }
        }
        if st.epoch() != self.seen_epoch {
            self.enter_epoch();
        }
        if let BroadcastMsg::LocalTimestamp { tx, .. } = msg {
            self.stamp(tx, now, &mut out.broadcasts);
        }
        self.maybe_resume(now, &mut out.broadcasts);
        self.emit(&mut out.broadcasts);
        out
    }

    /// Shares for newly releasable transactions and signatures for new blocks and batches.
    fn emit(&mut self, out: &mut Vec<BroadcastMsg>) {
        let Some(st) = self.state.as_ref() else {
            return;
        };
        let epoch = st.epoch();
        if self.behavior.stamps() {
            for (h, tau_prime) in st.releasable() {
                let encrypted = st.pending().get(&h).is_some_and(|r| MockThreshold.is_encrypted(&r.tx.ciphertext));
                if encrypted && self.shared.insert(h) {
                    let share = MockThreshold.share(self.id, &h);
                    out.push(BroadcastMsg::DecryptionShare { epoch, id: self.id, hash: h, share, tau_prime });
                }
            }
        }
        if self.behavior.signs() {
            for cb in &st.chain()[self.block_cursor..] {
                if !cb.forced {
                    let digest = cb.block.digest();
                    let sig = sign(self.id, &digest);
                    out.push(BroadcastMsg::BlockSignature { epoch, id: self.id, height: cb.block.height, digest, sig });
                }
            }
            for rec in &st.batches()[self.batch_cursor..] {
                let digest = rec.batch.digest();
                out.push(BroadcastMsg::BatchSignature {
                    epoch,
                    id: self.id,
                    block_number: rec.batch.header.block_number,
                    digest,
                    sig: sign(self.id, &digest),
                });
            }
        }
        self.block_cursor = st.chain().len();
        self.batch_cursor = st.batches().len();
    }

    fn enter_epoch(&mut self) {
        let st = self.state.as_ref().expect("epochs change only with state");
        self.seen_epoch = st.epoch();
        self.stamped.clear();
        self.shared.clear();
        let Some(change) = st.last_epoch() else {
            return;
        };
        let forced_height = change.forced.height as usize;
        self.block_cursor = self.block_cursor.min(forced_height);
        let kept = st.batches().iter().take_while(|b| (b.batch.header.block_number as usize) < forced_height).count();
        self.batch_cursor = self.batch_cursor.min(kept);
        self.paused_until = Some(Micros(change.forced.timestamp as i64 * 1_000_000));

        // Our own orphans keep their relative order; the rest follow by hash.
        let id = self.id;
        let mut orphans: Vec<&OrphanTx> = change.orphan_txs.iter().collect();
        orphans.sort_by(|a, b| match (a.stamps.get(&id), b.stamps.get(&id)) {
            (Some(x), Some(y)) => x.cmp(y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => a.tx.hash().cmp(&b.tx.hash()),
        });
        let mut backlog: Vec<EncTx> = orphans.into_iter().map(|o| o.tx.clone()).collect();
        for tx in std::mem::take(&mut self.backlog) {
            if !backlog.iter().any(|b| b.hash() == tx.hash()) {
                backlog.push(tx);
            }
        }
        self.backlog = backlog;
    }

    /// Drops local state and asks the committee for help. The returned
    /// message must be broadcast by the caller.
    pub fn start_recovery(&mut self, nonce: u64) -> BroadcastMsg {
        if let Some(st) = &self.state {
            self.seen_epoch = st.epoch();
        }
        self.state = None;
        self.snapshots.clear();
        self.paused_until = None;
        self.recovery = Some(Recovery {
            nonce,
            started: false,
            recorded: Vec::new(),
            votes: BTreeMap::new(),
            target: None,
            tried: BTreeSet::new(),
        });
        BroadcastMsg::Recover { id: self.id, nonce }
    }

    fn deliver_recovering(&mut self, sender: SequencerId, msg: &BroadcastMsg, now: Micros, out: &mut ReplicaOutput) {
        let f = self.params.f;
        let rec = self.recovery.as_mut().expect("called while recovering");
        if !rec.started {
            if sender == self.id && *msg == (BroadcastMsg::Recover { id: self.id, nonce: rec.nonce }) {
                rec.started = true;
            }
        } else {
            rec.recorded.push((sender, msg.clone()));
            if let BroadcastMsg::StateHash { from, recovering, nonce, digest } = msg {
                if *from == sender && *recovering == self.id && *nonce == rec.nonce {
                    rec.votes.entry(*digest).or_default().insert(*from);
                }
            }
            if rec.target.is_none() {
                if let Some((d, ids)) = rec.votes.iter().find(|(_, ids)| ids.len() > f) {
                    let candidates: Vec<SequencerId> = ids.difference(&rec.tried).copied().collect();
                    if !candidates.is_empty() {
                        rec.target = Some(*d);
                        out.fetch = Some(FetchRequest { nonce: rec.nonce, digest: *d, candidates });
                    }
                }
            }
        }
        if let BroadcastMsg::LocalTimestamp { tx, .. } = msg {
            self.stamp(tx, now, &mut out.broadcasts);
        }
    }

    /// State this replica captured when it applied `Recover(recovering, nonce)`.
    pub fn snapshot_for(&self, recovering: SequencerId, nonce: u64) -> Option<&SequencerState> {
        if self.behavior == Behavior::Crashed || self.behavior == Behavior::Silent {
            return None;
        }
        self.snapshots.get(&(recovering, nonce))
    }

    /// Hands over the snapshot fetched from `from`. A snapshot that does not
    /// match the agreed digest is discarded and another peer is requested.
    pub fn complete_recovery(
        &mut self,
        from: SequencerId,
        snapshot: Option<SequencerState>,
        now: Micros,
        l1: &dyn L1View,
    ) -> ReplicaOutput {
        let mut out = ReplicaOutput::default();
        let Some(rec) = self.recovery.as_mut() else {
            return out;
        };
        let Some(target) = rec.target else {
            return out;
        };
        rec.tried.insert(from);
        let mut st = match snapshot {
            Some(s) if s.digest() == target => s,
            _ => {
                let candidates: Vec<SequencerId> = rec.votes[&target].difference(&rec.tried).copied().collect();
                if candidates.is_empty() {
                    rec.target = None;
                } else {
                    out.fetch = Some(FetchRequest { nonce: rec.nonce, digest: target, candidates });
                }
                return out;
            }
        };
        let rec = self.recovery.take().expect("checked above");
        for (sender, msg) in &rec.recorded {
            let _ = st.apply(*sender, msg, l1);
        }
        st.take_events();
        if let Some(m) = st.max_ts()[self.id as usize] {
            self.last_issued = self.last_issued.max(Some(m));
        }
        // stamps issued while recovering still count if they carry the right epoch
        if self.seen_epoch != st.epoch() {
            self.stamped.clear();
        }
        self.seen_epoch = st.epoch();
        self.block_cursor = st.chain().len();
        self.batch_cursor = st.batches().len();
        self.shared.clear();
        let me = self.id;
        self.stamped.extend(st.pending().iter().filter(|(_, r)| r.stamps.contains_key(&me)).map(|(h, _)| *h));
        let missing: Vec<EncTx> =
            st.pending().iter().filter(|(h, _)| !self.stamped.contains(*h)).map(|(_, r)| r.tx.clone()).collect();
        self.state = Some(st);
        for tx in &missing {
            self.stamp(tx, now, &mut out.broadcasts);
        }
        self.emit(&mut out.broadcasts);
        out
    }
}
