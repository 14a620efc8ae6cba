use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Mutex;

use super::{score, ScoreError, ScoreParams, Transaction};

struct Entry {
    score: f64,
    tx: Transaction,
}

/// Max-priority queue of pending transactions keyed by score.
///
/// Binary heap in a flat vector. Ties go to the earlier arrival, then the
/// smaller id. Every key comparison is counted so callers can check the
/// logarithmic cost of a push.
pub struct PendingQueue {
    params: ScoreParams,
    heap: Vec<Entry>,
    seen: HashSet<String>,
    last_emit: Option<f64>,
    comparisons: u64,
}

impl PendingQueue {
    pub fn new(params: ScoreParams) -> Self {
        PendingQueue { params, heap: Vec::new(), seen: HashSet::new(), last_emit: None, comparisons: 0 }
    }

    pub fn params(&self) -> &ScoreParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Total key comparisons performed so far.
    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    pub fn peek(&self) -> Option<&Transaction> {
        self.heap.first().map(|e| &e.tx)
    }

    pub fn push(&mut self, tx: Transaction) -> Result<(), ScoreError> {
        if !self.seen.insert(tx.id().to_string()) {
            return Err(ScoreError::DuplicateId(tx.id().to_string()));
        }
        let s = score(&tx, &self.params).0;
        self.heap.push(Entry { score: s, tx });
        self.sift_up(self.heap.len() - 1);
        Ok(())
    }

    /// Removes and returns the highest-priority transaction regardless of
    /// its release time.
    pub fn pop(&mut self) -> Option<Transaction> {
        if self.heap.is_empty() {
            return None;
        }
        let last = self.heap.len() - 1;
        self.heap.swap(0, last);
        let top = self.heap.pop().map(|e| e.tx);
        if !self.heap.is_empty() {
            self.sift_down(0);
        }
        top
    }

    /// Emits, best score first, every pending transaction whose release time
    /// is at or before `now` (seconds). Emission is final.
    pub fn emit(&mut self, now: f64) -> Result<Vec<Transaction>, ScoreError> {
        if let Some(last) = self.last_emit {
            if now < last {
                return Err(ScoreError::TimeRegression { last, now });
            }
        }
        self.last_emit = Some(now);
        let mut out = Vec::new();
        while let Some(head) = self.heap.first() {
            // release_time = g - score
            if self.params.g - head.score > now {
                break;
            }
            out.extend(self.pop());
        }
        Ok(out)
    }

    /// `Less` when `a` has priority over `b`.
    fn cmp_entries(&mut self, a: usize, b: usize) -> Ordering {
        self.comparisons += 1;
        let (ea, eb) = (&self.heap[a], &self.heap[b]);
        eb.score
            .total_cmp(&ea.score)
            .then_with(|| ea.tx.arrival().cmp(&eb.tx.arrival()))
            .then_with(|| ea.tx.id().cmp(eb.tx.id()))
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.cmp_entries(i, parent) == Ordering::Less {
                self.heap.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let mut best = l;
            if r < n && self.cmp_entries(r, l) == Ordering::Less {
                best = r;
            }
            if self.cmp_entries(best, i) == Ordering::Less {
                self.heap.swap(best, i);
                i = best;
            } else {
                break;
            }
        }
    }
}

/// Pending queue shared by many producers and a single emitting consumer.
pub struct ConcurrentSequencer {
    inner: Mutex<PendingQueue>,
}

impl ConcurrentSequencer {
    pub fn new(params: ScoreParams) -> Self {
        ConcurrentSequencer { inner: Mutex::new(PendingQueue::new(params)) }
    }

    pub fn push(&self, tx: Transaction) -> Result<(), ScoreError> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).push(tx)
    }

    pub fn emit(&self, now: f64) -> Result<Vec<Transaction>, ScoreError> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).emit(now)
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::{order, release_time};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn tx(id: &str, t: f64, b: f64) -> Transaction {
        Transaction::new(id, t, b, vec![]).unwrap()
    }

    #[test]
    fn head_is_max_score() {
        let mut q = PendingQueue::new(ScoreParams::default());
        // scores -1, 0.2 (t=0.05, b=1 -> 0.25-0.05), -3
        q.push(tx("a", 1.0, 0.0)).unwrap();
        q.push(tx("b", 0.05, 1.0)).unwrap();
        q.push(tx("c", 3.0, 0.0)).unwrap();
        assert_eq!(q.peek().unwrap().id(), "b");
    }

    #[test]
    fn push_pop_identity() {
        let mut q = PendingQueue::new(ScoreParams::default());
        let a = tx("a", 1.0, 2.0);
        q.push(a.clone()).unwrap();
        assert_eq!(q.pop(), Some(a));
        assert!(q.is_empty());
    }

    #[test]
    fn duplicate_rejected() {
        let mut q = PendingQueue::new(ScoreParams::default());
        q.push(tx("a", 1.0, 0.0)).unwrap();
        assert_eq!(q.push(tx("a", 2.0, 0.0)), Err(ScoreError::DuplicateId("a".into())));
    }

    #[test]
    fn pop_order_matches_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = ScoreParams::default();
        let txs: Vec<_> =
            (0..500).map(|i| tx(&format!("t{i}"), rng.random_range(0.0..10.0), rng.random_range(0.0..5.0))).collect();
        let mut q = PendingQueue::new(params);
        for t in &txs {
            q.push(t.clone()).unwrap();
        }
        let popped: Vec<_> = std::iter::from_fn(|| q.pop()).collect();
        assert_eq!(popped, order(&txs, &params));
    }

    #[test]
    fn fcfs_when_bids_are_zero() {
        let params = ScoreParams::default();
        let mut q = PendingQueue::new(params);
        for (id, t) in [("x", 0.3), ("y", 0.1), ("z", 0.2)] {
            q.push(tx(id, t, 0.0)).unwrap();
        }
        let out = q.emit(0.3 + params.g).unwrap();
        let ids: Vec<_> = out.iter().map(|t| t.id()).collect();
        assert_eq!(ids, ["y", "z", "x"]);
    }

    #[test]
    fn high_bid_jumps_ahead() {
        let params = ScoreParams::default();
        let mut q = PendingQueue::new(params);
        q.push(tx("A", 0.0, 0.0)).unwrap();
        q.push(tx("B", 0.1, 1e9)).unwrap();
        let out = q.emit(0.6).unwrap();
        let ids: Vec<_> = out.iter().map(|t| t.id()).collect();
        assert_eq!(ids, ["B", "A"]);
    }

    #[test]
    fn emits_only_released() {
        let params = ScoreParams::default();
        let mut q = PendingQueue::new(params);
        let a = tx("a", 1.0, 1.0);
        q.push(a.clone()).unwrap();
        assert!(q.emit(1.2).unwrap().is_empty());
        assert_eq!(q.emit(release_time(&a, &params)).unwrap(), vec![a]);
    }

    #[test]
    fn time_regression_is_an_error() {
        let mut q = PendingQueue::new(ScoreParams::default());
        q.emit(5.0).unwrap();
        assert!(matches!(q.emit(4.0), Err(ScoreError::TimeRegression { .. })));
        assert!(q.emit(5.0).is_ok());
    }

    #[test]
    fn concurrent_producers() {
        let seq = Arc::new(ConcurrentSequencer::new(ScoreParams::default()));
        let handles: Vec<_> = (0..4)
            .map(|w| {
                let seq = Arc::clone(&seq);
                std::thread::spawn(move || {
                    for i in 0..250 {
                        seq.push(tx(&format!("{w}-{i}"), i as f64 * 0.001, (w * i % 7) as f64)).unwrap();
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert_eq!(seq.len(), 1000);
        let out = seq.emit(100.0).unwrap();
        assert_eq!(out.len(), 1000);
        let params = ScoreParams::default();
        assert!(out.windows(2).all(|w| score(&w[0], &params).0 >= score(&w[1], &params).0));
        assert!(seq.is_empty());
    }
}
