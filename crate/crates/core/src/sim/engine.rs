//! The discrete-event loop.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Action, ScriptStep, SimConfig};
use super::metrics::{compare_to_centralized, DelayStats, LogEvent, LogRecord, Metrics, OrderedTx, TxMetric};
use crate::committee::state::ChainBlock;
use crate::committee::{
    submit_delayed, BroadcastMsg, CommitteeParams, Digest, EncTx, L1Stub, MockThreshold, Outcome, Plaintext, Replica,
    SequencerId, SequencerState, SignedBatch, StateEvent, ThresholdScheme, TimestampTriple,
};
use crate::score::Micros;

#[derive(Debug, Clone)]
enum Ev {
    Step(usize),
    Arrive { replica: SequencerId, tx: EncTx },
    Deliver { replica: SequencerId, idx: usize },
    Tick,
    DelayedVisible { tx: EncTx },
    AnnounceEpoch { b: u64, txid: Digest },
    Fetch { replica: SequencerId, peer: SequencerId },
}

#[derive(Debug)]
struct Scheduled {
    at: i64,
    seq: u64,
    ev: Ev,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        (self.at, self.seq) == (other.at, other.seq)
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.at, self.seq).cmp(&(other.at, other.seq))
    }
}

#[derive(Debug, Clone)]
struct Submission {
    hash: Digest,
    delayed: bool,
    bid: f64,
    at: f64,
}

#[derive(Debug, Clone, Copy)]
struct Resolution {
    tau: TimestampTriple,
    tau_prime: f64,
    complete: bool,
    epoch: u64,
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub log: Vec<LogRecord>,
    pub metrics: Metrics,
    pub txs: Vec<TxMetric>,
    /// Final state digest of every replica that has a state.
    pub digests: Vec<(SequencerId, Digest)>,
    /// Final chain at the observer replica.
    pub chain: Vec<ChainBlock>,
    /// Timestamps issued by each replica over the whole run.
    pub issued: Vec<Vec<TimestampTriple>>,
    /// Batch digests held by each honest replica.
    pub batch_digests: Vec<(SequencerId, Vec<Digest>)>,
    pub l1: L1Stub,
    /// Every broadcast message with its transport-level sender, in total order.
    pub broadcast: Vec<(SequencerId, BroadcastMsg)>,
}

impl SimOutcome {
    pub fn log_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.log {
            out.push_str(&serde_json::to_string(r).expect("log records serialize"));
            out.push('\n');
        }
        out
    }
}

struct Engine<'a> {
    cfg: &'a SimConfig,
    params: CommitteeParams,
    observer: SequencerId,
    rng: ChaCha8Rng,
    now: i64,
    seq: u64,
    heap: BinaryHeap<Reverse<Scheduled>>,
    other_events: usize,
    tick_scheduled: bool,
    steps: Vec<ScriptStep>,
    replicas: Vec<Replica>,
    skew: Vec<i64>,
    latency: Vec<Vec<f64>>,
    log: Vec<(SequencerId, BroadcastMsg)>,
    cursor: Vec<usize>,
    last_delivery: Vec<i64>,
    paused: Vec<bool>,
    nonces: Vec<u64>,
    next_nonce: u64,
    l1: L1Stub,
    records: Vec<LogRecord>,
    subs: Vec<Submission>,
    resolved: BTreeMap<Digest, Resolution>,
    included_at: BTreeMap<Digest, f64>,
    fees: BTreeMap<Digest, f64>,
    posted: BTreeSet<(u64, u64, Digest)>,
    epochs: usize,
    batches_closed: usize,
    batches_posted: usize,
    batches_rejected: usize,
    recovered: Vec<SequencerId>,
    prior_issued: Vec<Vec<TimestampTriple>>,
    trace: Vec<(SequencerId, usize, i64)>,
}

fn secs_to_micros(s: f64) -> i64 {
    Micros::from_secs_f64(s).0
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a SimConfig) -> Self {
        let params = cfg.committee();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let n = cfg.n;
        let skew = (0..n)
            .map(|_| {
                if cfg.clock_skew > 0.0 {
                    secs_to_micros(rng.random_range(-cfg.clock_skew..=cfg.clock_skew))
                } else {
                    0
                }
            })
            .collect();
        let latency = match &cfg.latency_matrix {
            Some(m) => m.clone(),
            None => (0..cfg.users)
                .map(|_| (0..n).map(|_| rng.random_range(cfg.user_latency.min..=cfg.user_latency.max)).collect())
                .collect(),
        };
        let mut steps = cfg.script.clone();
        if let Some(w) = &cfg.workload {
            for i in 0..w.count {
                let jitter = if w.jitter > 0.0 { rng.random_range(0.0..w.jitter) } else { 0.0 };
                steps.push(ScriptStep {
                    at: w.start + i as f64 * w.spacing + jitter,
                    action: Action::Submit {
                        user: i % cfg.users,
                        bid: w.bids.sample(&mut rng),
                        declared: None,
                        body: format!("w{i}"),
                        malformed: false,
                    },
                });
            }
        }
        steps.sort_by(|a, b| a.at.total_cmp(&b.at));
        let replicas = (0..n as SequencerId)
            .map(|i| Replica::new(i, cfg.behavior(i), params).expect("validated config"))
            .collect();
        Engine {
            cfg,
            params,
            observer: cfg.observer().expect("validated config"),
            rng,
            now: 0,
            seq: 0,
            heap: BinaryHeap::new(),
            other_events: 0,
            tick_scheduled: false,
            steps,
            replicas,
            skew,
            latency,
            log: Vec::new(),
            cursor: vec![0; n],
            last_delivery: vec![0; n],
            paused: vec![false; n],
            nonces: vec![0; n],
            next_nonce: 1,
            l1: L1Stub::new(n, cfg.f, cfg.force_age),
            records: Vec::new(),
            subs: Vec::new(),
            resolved: BTreeMap::new(),
            included_at: BTreeMap::new(),
            fees: BTreeMap::new(),
            posted: BTreeSet::new(),
            epochs: 0,
            batches_closed: 0,
            batches_posted: 0,
            batches_rejected: 0,
            recovered: Vec::new(),
            prior_issued: vec![Vec::new(); n],
            trace: Vec::new(),
        }
    }

    fn secs(&self) -> f64 {
        self.now as f64 / 1e6
    }

    fn schedule(&mut self, at: i64, ev: Ev) {
        if !matches!(ev, Ev::Tick) {
            self.other_events += 1;
        }
        self.seq += 1;
        self.heap.push(Reverse(Scheduled { at, seq: self.seq, ev }));
    }

    fn record(&mut self, event: LogEvent) {
        self.records.push(LogRecord { t: self.secs(), event });
    }

    fn local_now(&self, r: SequencerId) -> Micros {
        Micros((self.now + self.skew[r as usize]).max(0))
    }

    fn broadcast(&mut self, from: SequencerId, msgs: Vec<BroadcastMsg>) {
        let (lo, hi) = (self.cfg.broadcast_delay.min, self.cfg.broadcast_delay.max);
        for msg in msgs {
            let idx = self.log.len();
            self.log.push((from, msg));
            for r in 0..self.cfg.n {
                let d = secs_to_micros(self.rng.random_range(lo..=hi));
                let at = self.last_delivery[r].max(self.now + d);
                self.last_delivery[r] = at;
                self.schedule(at, Ev::Deliver { replica: r as SequencerId, idx });
            }
        }
    }

    fn active(&self) -> bool {
        self.other_events > 0
            || (0..self.cfg.n)
                .any(|r| !self.paused[r] && (self.replicas[r].wants_ticks() || self.replicas[r].is_recovering()))
    }

    fn run(mut self) -> SimOutcome {
        for i in 0..self.steps.len() {
            let at = secs_to_micros(self.steps[i].at);
            self.schedule(at, Ev::Step(i));
        }
        self.schedule(0, Ev::Tick);
        self.tick_scheduled = true;
        let horizon = secs_to_micros(self.cfg.horizon);
        let mut hit_horizon = false;
        while let Some(Reverse(s)) = self.heap.pop() {
            if s.at > horizon {
                hit_horizon = true;
                break;
            }
            self.now = s.at;
            if matches!(s.ev, Ev::Tick) {
                self.tick_scheduled = false;
            } else {
                self.other_events -= 1;
            }
            self.handle(s.ev);
            if !self.tick_scheduled && self.active() {
                self.tick_scheduled = true;
                let at = self.now + secs_to_micros(self.cfg.tick);
                self.schedule(at, Ev::Tick);
            }
        }
        self.finish(hit_horizon)
    }

    fn handle(&mut self, ev: Ev) {
        match ev {
            Ev::Step(i) => self.step(i),
            Ev::Arrive { replica, tx } => {
                if !self.paused[replica as usize] {
                    let local = self.local_now(replica);
                    let out = self.replicas[replica as usize].on_user_tx(&tx, local);
                    self.broadcast(replica, out);
                }
            }
            Ev::Deliver { replica, idx } => {
                let r = replica as usize;
                if !self.paused[r] && idx == self.cursor[r] {
                    self.deliver(replica, idx);
                }
            }
            Ev::Tick => {
                for r in 0..self.cfg.n as SequencerId {
                    if !self.paused[r as usize] {
                        let local = self.local_now(r);
                        let out = self.replicas[r as usize].on_tick(local);
                        self.broadcast(r, out);
                    }
                }
            }
            Ev::DelayedVisible { tx } => {
                for r in 0..self.cfg.n as SequencerId {
                    if !self.paused[r as usize] {
                        let local = self.local_now(r);
                        let out = self.replicas[r as usize].on_user_tx(&tx, local);
                        self.broadcast(r, out);
                    }
                }
            }
            Ev::AnnounceEpoch { b, txid } => {
                for r in 0..self.cfg.n as SequencerId {
                    let rep = &self.replicas[r as usize];
                    if !self.paused[r as usize] && rep.behavior().is_honest() && rep.state().is_some() {
                        self.broadcast(r, vec![BroadcastMsg::NewEpoch { b, txid }]);
                    }
                }
            }
            Ev::Fetch { replica, peer } => self.fetch(replica, peer),
        }
    }

    fn deliver(&mut self, replica: SequencerId, idx: usize) {
        let r = replica as usize;
        self.cursor[r] = idx + 1;
        self.trace.push((replica, idx, self.now));
        let (from, msg) = self.log[idx].clone();
        let local = self.local_now(replica);
        let out = self.replicas[r].on_deliver(from, &msg, local, &self.l1);
        self.broadcast(replica, out.broadcasts);
        if let Some(req) = out.fetch {
            let at = self.now + secs_to_micros(self.cfg.fetch_delay);
            self.schedule(at, Ev::Fetch { replica, peer: req.candidates[0] });
        }
        self.drain_events(replica);
    }

    fn drain_events(&mut self, replica: SequencerId) {
        let Some(st) = self.replicas[replica as usize].state_mut() else {
            return;
        };
        let events = st.take_events();
        if replica != self.observer {
            return;
        }
        let epoch = st.epoch();
        for e in events {
            let ev = match e {
                StateEvent::Resolved { hash, tau, tau_prime, complete } => {
                    self.resolved.insert(hash, Resolution { tau, tau_prime, complete, epoch });
                    LogEvent::Resolved { hash: hash.to_hex(), epoch, tau: tau.secs(), tau_prime, complete }
                }
                StateEvent::Included { hash, height, tau_prime, fee, .. } => {
                    self.included_at.insert(hash, self.secs());
                    self.fees.insert(hash, fee);
                    LogEvent::Included { hash: hash.to_hex(), height, tau_prime }
                }
                StateEvent::Discarded { hash, reason } => {
                    LogEvent::Discarded { hash: hash.to_hex(), reason: reason.to_string() }
                }
                StateEvent::BlockFinal { height } => LogEvent::BlockFinal { height },
                StateEvent::BatchClosed { block_number } => {
                    self.batches_closed += 1;
                    LogEvent::BatchClosed { block_number }
                }
                StateEvent::BatchFinal { block_number } => LogEvent::BatchFinal { block_number },
                StateEvent::EpochStarted { epoch, forced_height, orphaned_blocks, orphan_txs } => {
                    self.epochs += 1;
                    LogEvent::EpochStarted { epoch, forced_height, orphaned_blocks, orphan_txs }
                }
            };
            self.record(ev);
        }
        self.post_batches();
    }

    /// Any party may post; the observer's view decides when a batch is ready.
    fn post_batches(&mut self) {
        let st = self.replicas[self.observer as usize].state().expect("observer keeps its state");
        let ready: Vec<SignedBatch> = st
            .batches()
            .iter()
            .filter(|r| r.signatures.len() > self.cfg.f)
            .filter(|r| !self.posted.contains(&(r.epoch, r.batch.header.block_number, r.batch.digest())))
            .map(|r| SignedBatch {
                epoch: r.epoch,
                batch: r.batch.clone(),
                signatures: r.signatures.iter().map(|(i, s)| (*i, s.clone())).collect(),
            })
            .collect();
        for sb in ready {
            let bn = sb.batch.header.block_number;
            self.posted.insert((sb.epoch, bn, sb.batch.digest()));
            match self.l1.post_batch(&sb) {
                Ok(()) => {
                    self.batches_posted += 1;
                    self.record(LogEvent::BatchPosted { block_number: bn, epoch: sb.epoch });
                }
                Err(e) => {
                    self.batches_rejected += 1;
                    self.record(LogEvent::BatchRejected { block_number: bn, epoch: sb.epoch, reason: e.to_string() });
                }
            }
        }
    }

    fn fetch(&mut self, replica: SequencerId, peer: SequencerId) {
        let r = replica as usize;
        let snapshot = if self.cfg.corrupt_snapshots.contains(&peer) {
            Some(SequencerState::new(self.params).expect("validated config"))
        } else {
            self.replicas[peer as usize].snapshot_for(replica, self.nonces[r]).cloned()
        };
        let local = self.local_now(replica);
        let out = self.replicas[r].complete_recovery(peer, snapshot, local, &self.l1);
        let accepted = !self.replicas[r].is_recovering();
        self.record(LogEvent::SnapshotFetched { replica, from: peer, accepted });
        if accepted {
            self.recovered.push(replica);
            self.record(LogEvent::Recovered { replica });
        }
        self.broadcast(replica, out.broadcasts);
        if let Some(req) = out.fetch {
            let at = self.now + secs_to_micros(self.cfg.fetch_delay);
            self.schedule(at, Ev::Fetch { replica, peer: req.candidates[0] });
        }
    }

    fn step(&mut self, i: usize) {
        let action = self.steps[i].action.clone();
        match action {
            Action::Submit { user, bid, declared, body, malformed } => {
                let bytes = if malformed {
                    let mut b = vec![0xff];
                    b.extend_from_slice(body.as_bytes());
                    b
                } else {
                    Plaintext::User { fee: bid, body: body.into_bytes() }.encode()
                };
                let declared = declared.unwrap_or(bid);
                let tx = EncTx::new(MockThreshold.encrypt(&bytes), declared);
                let id = self.subs.len();
                self.subs.push(Submission { hash: tx.hash(), delayed: false, bid, at: self.secs() });
                self.record(LogEvent::Submitted { tx: id, hash: tx.hash().to_hex(), delayed: false, bid, declared });
                for r in 0..self.cfg.n {
                    let at = self.now + secs_to_micros(self.latency[user][r]);
                    self.schedule(at, Ev::Arrive { replica: r as SequencerId, tx: tx.clone() });
                }
            }
            Action::Delayed { body, withhold } => {
                let index = self.l1.enqueue_delayed(body.clone().into_bytes(), self.secs());
                let tx = submit_delayed(index, body.as_bytes());
                let id = self.subs.len();
                self.subs.push(Submission { hash: tx.hash(), delayed: true, bid: 0.0, at: self.secs() });
                self.record(LogEvent::DelayedEnqueued { index, withheld: withhold });
                self.record(LogEvent::Submitted {
                    tx: id,
                    hash: tx.hash().to_hex(),
                    delayed: true,
                    bid: 0.0,
                    declared: 0.0,
                });
                if !withhold {
                    let at = self.now + secs_to_micros(self.cfg.l1_lag);
                    self.schedule(at, Ev::DelayedVisible { tx });
                }
            }
            Action::ForceInclude { index } => match self.l1.force_include(index, self.secs()) {
                Ok(fi) => {
                    self.record(LogEvent::ForceIncluded {
                        index,
                        l1_block: fi.l1_block,
                        height: fi.height,
                        timestamp: fi.timestamp,
                    });
                    let at = self.now + secs_to_micros(self.cfg.l1_lag);
                    self.schedule(at, Ev::AnnounceEpoch { b: fi.l1_block, txid: fi.txid });
                }
                Err(e) => self.record(LogEvent::ForceRejected { index, reason: e.to_string() }),
            },
            Action::Pause { replica } => {
                self.paused[replica as usize] = true;
                self.record(LogEvent::Paused { replica });
            }
            Action::Resume { replica } => {
                let r = replica as usize;
                if self.paused[r] {
                    self.paused[r] = false;
                    let end = self.log.len();
                    let backlog = end - self.cursor[r];
                    self.record(LogEvent::Resumed { replica, backlog });
                    while self.cursor[r] < end && !self.paused[r] {
                        let idx = self.cursor[r];
                        self.deliver(replica, idx);
                    }
                }
            }
            Action::Recover { replica, cold } => {
                let r = replica as usize;
                if cold {
                    let old = std::mem::replace(
                        &mut self.replicas[r],
                        Replica::cold(replica, self.cfg.behavior(replica), self.params).expect("validated config"),
                    );
                    self.prior_issued[r].extend_from_slice(old.issued());
                }
                self.paused[r] = false;
                self.cursor[r] = self.log.len();
                let nonce = self.next_nonce;
                self.next_nonce += 1;
                self.nonces[r] = nonce;
                let msg = self.replicas[r].start_recovery(nonce);
                self.record(LogEvent::RecoveryStarted { replica, cold, nonce });
                self.broadcast(replica, vec![msg]);
            }
        }
    }

    fn finish(self, hit_horizon: bool) -> SimOutcome {
        let cfg = self.cfg;
        let obs = self.replicas[self.observer as usize].state().expect("observer keeps its state");

        // per-transaction view
        let mut txs = Vec::new();
        let mut seen = BTreeSet::new();
        let (mut included, mut discarded, mut dropped) = (0, 0, 0);
        let mut delays = Vec::new();
        for (i, s) in self.subs.iter().enumerate() {
            let outcome = obs.outcome(&s.hash);
            let fresh = seen.insert(s.hash);
            let (label, reason, height) = match outcome {
                Some(Outcome::Included { height }) => ("included", None, Some(*height)),
                Some(Outcome::Discarded(r)) => ("discarded", Some(r.to_string()), None),
                None => ("unfinished", None, None),
            };
            if fresh {
                match label {
                    "included" => included += 1,
                    "discarded" => discarded += 1,
                    _ => dropped += 1,
                }
            }
            let res = self.resolved.get(&s.hash);
            let inc = self.included_at.get(&s.hash).copied();
            let delay = inc.filter(|_| label == "included").map(|t| t - s.at);
            if let Some(d) = delay {
                if !s.delayed {
                    delays.push(d);
                }
            }
            txs.push(TxMetric {
                tx: i,
                hash: s.hash.to_hex(),
                delayed: s.delayed,
                bid: s.bid,
                submit_time: s.at,
                tau: res.map(|r| r.tau.secs()),
                tau_prime: res.map(|r| r.tau_prime),
                included_at: inc,
                height,
                outcome: label.to_string(),
                reason,
                delay,
            });
        }

        // digests and batches across honest replicas
        let mut digests = Vec::new();
        let mut honest_digests = Vec::new();
        let mut batch_digests = Vec::new();
        let mut still_recovering = Vec::new();
        for (r, rep) in self.replicas.iter().enumerate() {
            if rep.is_recovering() {
                still_recovering.push(r as SequencerId);
            }
            if let Some(st) = rep.state() {
                let d = st.digest();
                digests.push((r as SequencerId, d));
                if rep.behavior().is_honest() && !self.paused[r] && !rep.is_recovering() {
                    honest_digests.push((r as SequencerId, d.to_hex()));
                    batch_digests.push((r as SequencerId, st.batches().iter().map(|b| b.batch.digest()).collect()));
                }
            }
        }
        let digests_equal = honest_digests.windows(2).all(|w| w[0].1 == w[1].1);
        let batches_identical = batch_digests.windows(2).all(|w: &[(SequencerId, Vec<Digest>)]| w[0].1 == w[1].1);

        // centralized audit over stretches between forced blocks
        let mut ordered = Vec::new();
        let mut segment = 0;
        for cb in obs.chain() {
            if cb.forced {
                segment += 1;
                continue;
            }
            let Some(res) = self.resolved.get(&cb.tx_hash) else { continue };
            let fee = self.fees.get(&cb.tx_hash).copied().unwrap_or(0.0);
            ordered.push(OrderedTx { hash: cb.tx_hash, tau: res.tau.t, fee, segment });
        }
        let centralized = compare_to_centralized(&ordered, &cfg.params);

        // brute-force median for transactions stamped by everyone
        let (mut median_checked, mut median_mismatches) = (0, 0);
        let mut first_stamps: BTreeMap<(u64, Digest), BTreeMap<SequencerId, TimestampTriple>> = BTreeMap::new();
        for (from, msg) in &self.log {
            if let BroadcastMsg::LocalTimestamp { epoch, id, tx, ts } = msg {
                if id == from {
                    first_stamps.entry((*epoch, tx.hash())).or_default().entry(*id).or_insert(*ts);
                }
            }
        }
        for (h, res) in &self.resolved {
            if !res.complete {
                continue;
            }
            median_checked += 1;
            let mut all: Vec<TimestampTriple> =
                first_stamps.get(&(res.epoch, *h)).map(|m| m.values().copied().collect()).unwrap_or_default();
            all.sort();
            if all.len() != cfg.n || all[cfg.n / 2] != res.tau {
                median_mismatches += 1;
            }
        }

        // per-sender timestamps strictly increase in broadcast order
        let mut last: BTreeMap<SequencerId, TimestampTriple> = BTreeMap::new();
        let mut timestamps_monotone = true;
        for (from, msg) in &self.log {
            let ts = match msg {
                BroadcastMsg::LocalTimestamp { ts, .. } | BroadcastMsg::Heartbeat { ts, .. } => *ts,
                _ => continue,
            };
            if last.get(from).is_some_and(|l| *l >= ts) {
                timestamps_monotone = false;
            }
            last.insert(*from, ts);
        }
        let issued: Vec<Vec<TimestampTriple>> = self
            .replicas
            .iter()
            .enumerate()
            .map(|(r, rep)| {
                let mut all = self.prior_issued[r].clone();
                all.extend_from_slice(rep.issued());
                all
            })
            .collect();
        timestamps_monotone &= issued.iter().all(|v| v.windows(2).all(|w| w[0] < w[1]));

        let unfinished_work = self.replicas.iter().enumerate().any(|(r, rep)| {
            rep.behavior().is_honest() && !self.paused[r] && rep.state().is_some_and(|s| !s.pending().is_empty())
        });
        let liveness = dropped == 0 && !unfinished_work && still_recovering.is_empty();

        let mut violations = Vec::new();
        if !digests_equal {
            violations.push("honest replicas ended with different state digests".to_string());
        }
        if !batches_identical {
            violations.push("honest replicas hold different batches".to_string());
        }
        if dropped > 0 {
            violations.push(format!("{dropped} submitted transactions were neither included nor discarded"));
        }
        if !liveness {
            violations.push("liveness: work still outstanding at the end of the run".to_string());
        }
        if centralized.divergent_positions > 0 {
            violations.push(format!("{} positions differ from the centralized order", centralized.divergent_positions));
        }
        if centralized.fairness_violations > 0 {
            violations.push(format!("{} g-fairness violations", centralized.fairness_violations));
        }
        if median_mismatches > 0 {
            violations.push(format!("{median_mismatches} consensus timestamps differ from the median"));
        }
        if !timestamps_monotone {
            violations.push("a replica issued non-increasing timestamps".to_string());
        }

        let metrics = Metrics {
            name: cfg.name.clone(),
            n: cfg.n,
            f: cfg.f,
            seed: cfg.seed,
            observer: self.observer,
            submitted: seen.len(),
            included,
            discarded,
            dropped,
            liveness,
            hit_horizon,
            honest_digests,
            digests_equal,
            batches_identical,
            centralized,
            median_checked,
            median_mismatches,
            timestamps_monotone,
            epochs: self.epochs,
            chain_length: obs.chain().len(),
            batches_closed: self.batches_closed,
            batches_posted: self.batches_posted,
            batches_rejected: self.batches_rejected,
            recovered: self.recovered.clone(),
            still_recovering,
            delay: DelayStats::of(&delays),
            messages: self.log.len(),
            end_time: self.secs(),
            violations,
        };
        SimOutcome {
            log: self.records,
            metrics,
            txs,
            digests,
            chain: obs.chain().to_vec(),
            issued,
            batch_digests,
            l1: self.l1,
            broadcast: self.log,
        }
    }
}

/// Runs a scenario to completion.
pub fn run_scenario(cfg: &SimConfig) -> SimOutcome {
    Engine::new(cfg).run()
}
