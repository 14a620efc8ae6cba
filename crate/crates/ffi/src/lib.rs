//! C ABI over the `timeboost` crate.
//!
//! Objects cross the boundary as opaque handles created by a `*_new`/`*_run`
//! call and released with the matching `*_free`. Every fallible call
//! returns a [`TbStatus`]; on failure a message for the calling thread is
//! available from [`tb_last_error`]. Panics are caught and reported as
//! [`TbStatus::Panic`]. Strings are copied into caller buffers: pass a
//! buffer and its length, get back the number of bytes needed (including
//! the trailing NUL) through `needed`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::collections::VecDeque;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use timeboost::econ::bidding_share;
use timeboost::score::{self, PendingQueue, ScoreError, ScoreParams, Transaction};
use timeboost::sim::{run_scenario, SimConfig, SimOutcome};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    DuplicateId = 4,
    TimeRegression = 5,
    /// The output buffer is too small; `needed` holds the required size.
    BufferTooSmall = 6,
    /// Nothing left to read.
    Empty = 7,
    InvalidConfig = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: TbStatus, msg: impl Into<String>) -> TbStatus {
    set_error(msg);
    status
}

fn guard<F: FnOnce() -> TbStatus>(f: F) -> TbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(TbStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn score_status(e: &ScoreError) -> TbStatus {
    let status = match e {
        ScoreError::DuplicateId(_) => TbStatus::DuplicateId,
        ScoreError::TimeRegression { .. } => TbStatus::TimeRegression,
        _ => TbStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn params(g: f64, c: f64) -> Result<ScoreParams, TbStatus> {
    ScoreParams::new(g, c).map_err(|e| score_status(&e))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, TbStatus> {
    if p.is_null() {
        return Err(fail(TbStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(TbStatus::InvalidUtf8, e.to_string()))
}

/// Copies `s` plus a NUL into `buf` when it fits and reports the size.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> TbStatus {
    let size = s.len() + 1;
    if !needed.is_null() {
        *needed = size;
    }
    if buf.is_null() || len < size {
        return fail(TbStatus::BufferTooSmall, format!("need {size} bytes, got {len}"));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    TbStatus::Ok
}

macro_rules! out_ptr {
    ($p:expr) => {
        if $p.is_null() {
            return fail(TbStatus::NullPointer, concat!("null output pointer `", stringify!($p), "`"));
        }
    };
}

/// Copies the calling thread's last error message into `buf`.
#[no_mangle]
pub unsafe extern "C" fn tb_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> TbStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    write_str(&msg, buf, len, needed)
}

/// Time boost `g*bid/(bid+c)`.
#[no_mangle]
pub unsafe extern "C" fn tb_time_boost(bid: f64, g: f64, c: f64, out: *mut f64) -> TbStatus {
    guard(|| {
        out_ptr!(out);
        let p = match params(g, c) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match score::time_boost(bid, &p) {
            Ok(v) => {
                *out = v;
                TbStatus::Ok
            }
            Err(e) => score_status(&e),
        }
    })
}

/// Score and release time of a transaction arriving at `t_secs` with `bid`.
#[no_mangle]
pub unsafe extern "C" fn tb_score(
    t_secs: f64,
    bid: f64,
    g: f64,
    c: f64,
    out_score: *mut f64,
    out_release: *mut f64,
) -> TbStatus {
    guard(|| {
        out_ptr!(out_score);
        out_ptr!(out_release);
        let p = match params(g, c) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match Transaction::new("", t_secs, bid, Vec::new()) {
            Ok(tx) => {
                *out_score = score::score(&tx, &p).value();
                *out_release = score::release_time(&tx, &p);
                TbStatus::Ok
            }
            Err(e) => score_status(&e),
        }
    })
}

/// Expected equilibrium bid and latency spend per player for `n` uniform bidders.
#[no_mangle]
pub unsafe extern "C" fn tb_bidding_share(g: f64, n: u32, out_bid: *mut f64, out_latency: *mut f64) -> TbStatus {
    guard(|| {
        out_ptr!(out_bid);
        out_ptr!(out_latency);
        match bidding_share(g, n) {
            Ok(s) => {
                *out_bid = s.bid_share;
                *out_latency = s.latency_share;
                TbStatus::Ok
            }
            Err(e) => fail(TbStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Centralized sequencer queue.
pub struct TbQueue {
    queue: PendingQueue,
    emitted: VecDeque<(String, f64)>,
}

/// Creates an empty queue. Release with [`tb_queue_free`].
#[no_mangle]
pub unsafe extern "C" fn tb_queue_new(g: f64, c: f64, out: *mut *mut TbQueue) -> TbStatus {
    guard(|| {
        out_ptr!(out);
        match params(g, c) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(TbQueue { queue: PendingQueue::new(p), emitted: VecDeque::new() }));
                TbStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Releases a queue. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tb_queue_free(q: *mut TbQueue) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Adds a transaction.
#[no_mangle]
pub unsafe extern "C" fn tb_queue_push(q: *mut TbQueue, id: *const c_char, t_secs: f64, bid: f64) -> TbStatus {
    guard(|| {
        out_ptr!(q);
        let id = match read_str(id) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let q = &mut *q;
        match Transaction::new(id, t_secs, bid, Vec::new()).and_then(|tx| q.queue.push(tx)) {
            Ok(()) => TbStatus::Ok,
            Err(e) => score_status(&e),
        }
    })
}

/// Number of transactions still pending.
#[no_mangle]
pub unsafe extern "C" fn tb_queue_len(q: *const TbQueue, out: *mut usize) -> TbStatus {
    guard(|| {
        out_ptr!(q);
        out_ptr!(out);
        *out = (*q).queue.len();
        TbStatus::Ok
    })
}

/// Moves every transaction whose release time has passed at `now` to the
/// emitted list, in feed order, and reports how many were released.
#[no_mangle]
pub unsafe extern "C" fn tb_queue_emit(q: *mut TbQueue, now: f64, out_count: *mut usize) -> TbStatus {
    guard(|| {
        out_ptr!(q);
        out_ptr!(out_count);
        let q = &mut *q;
        let params = *q.queue.params();
        match q.queue.emit(now) {
            Ok(txs) => {
                *out_count = txs.len();
                q.emitted.extend(txs.iter().map(|tx| (tx.id().to_string(), score::score(tx, &params).value())));
                TbStatus::Ok
            }
            Err(e) => score_status(&e),
        }
    })
}

/// Pops the next emitted transaction, copying its id into `buf`. Returns
/// [`TbStatus::Empty`] when nothing is left. On
/// [`TbStatus::BufferTooSmall`] the entry stays in place.
#[no_mangle]
pub unsafe extern "C" fn tb_queue_next(
    q: *mut TbQueue,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
    out_score: *mut f64,
) -> TbStatus {
    guard(|| {
        out_ptr!(q);
        let q = &mut *q;
        let Some((id, s)) = q.emitted.front() else {
            return TbStatus::Empty;
        };
        let status = write_str(id, buf, len, needed);
        if status == TbStatus::Ok {
            if !out_score.is_null() {
                *out_score = *s;
            }
            q.emitted.pop_front();
        }
        status
    })
}

/// Result of one committee scenario.
pub struct TbSim {
    outcome: SimOutcome,
    metrics_json: String,
}

/// Runs the scenario described by `config_json`. Release with [`tb_sim_free`].
#[no_mangle]
pub unsafe extern "C" fn tb_sim_run(config_json: *const c_char, out: *mut *mut TbSim) -> TbStatus {
    guard(|| {
        out_ptr!(out);
        let text = match read_str(config_json) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let cfg = match SimConfig::from_json(text) {
            Ok(c) => c,
            Err(e) => return fail(TbStatus::InvalidConfig, e.to_string()),
        };
        let outcome = run_scenario(&cfg);
        let metrics_json = serde_json::to_string(&outcome.metrics).expect("metrics serialize");
        *out = Box::into_raw(Box::new(TbSim { outcome, metrics_json }));
        TbStatus::Ok
    })
}

/// Releases a scenario result. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tb_sim_free(sim: *mut TbSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Sets `out` to 1 when every run invariant held, else 0.
#[no_mangle]
pub unsafe extern "C" fn tb_sim_ok(sim: *const TbSim, out: *mut i32) -> TbStatus {
    guard(|| {
        out_ptr!(sim);
        out_ptr!(out);
        *out = (*sim).outcome.metrics.ok() as i32;
        TbStatus::Ok
    })
}

/// Copies the run metrics as a JSON object into `buf`.
#[no_mangle]
pub unsafe extern "C" fn tb_sim_metrics_json(
    sim: *const TbSim,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> TbStatus {
    guard(|| {
        out_ptr!(sim);
        write_str(&(*sim).metrics_json, buf, len, needed)
    })
}

/// Copies the event log as JSON lines into `buf`.
#[no_mangle]
pub unsafe extern "C" fn tb_sim_event_log(
    sim: *const TbSim,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> TbStatus {
    guard(|| {
        out_ptr!(sim);
        write_str(&(*sim).outcome.log_jsonl(), buf, len, needed)
    })
}
