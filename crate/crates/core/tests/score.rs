use proptest::prelude::*;

use timeboost::score::{
    feed_entries, order, read_transactions, release_time, score, time_boost, write_feed, FeedEntry, Micros,
    PendingQueue, ScoreError, ScoreParams, Transaction,
};

fn tx(id: &str, t: f64, bid: f64) -> Transaction {
    Transaction::new(id, t, bid, Vec::new()).unwrap()
}

#[test]
fn boost_examples() {
    let p = ScoreParams::default();
    assert_eq!(time_boost(0.0, &p).unwrap(), 0.0);
    assert_eq!(time_boost(1.0, &p).unwrap(), 0.25);
    assert!((time_boost(1e9, &p).unwrap() - 0.4999999995).abs() < 1e-15);
    assert_eq!(time_boost(-1.0, &p), Err(ScoreError::NegativeBid(-1.0)));
}

#[test]
fn score_and_release_examples() {
    let p = ScoreParams::default();
    assert_eq!(score(&tx("a", 5.0, 0.0), &p).value(), -5.0);
    assert_eq!(score(&tx("a", 0.0, 1.0), &p).value(), 0.25);
    assert!((score(&tx("a", 0.3, 1.0), &p).value() + 0.05).abs() < 1e-12);
    assert_eq!(release_time(&tx("a", 0.0, 0.0), &p), 0.5);
    assert_eq!(release_time(&tx("a", 1.0, 1.0), &p), 1.25);
    let r = release_time(&tx("a", 2.0, 1e300), &p);
    assert!((2.0..2.0 + 1e-9).contains(&r));
}

#[test]
fn queue_head_and_emission() {
    let p = ScoreParams::default();
    let mut q = PendingQueue::new(p);
    // scores -1, 0.2, -3
    q.push(tx("x", 1.0, 0.0)).unwrap();
    q.push(tx("y", 0.05, 1.0)).unwrap();
    q.push(tx("z", 3.0, 0.0)).unwrap();
    assert_eq!(q.peek().unwrap().id(), "y");
    assert!(matches!(q.push(tx("x", 4.0, 0.0)), Err(ScoreError::DuplicateId(_))));

    let ids = |v: Vec<Transaction>| v.iter().map(|t| t.id().to_string()).collect::<Vec<_>>();
    assert_eq!(ids(q.emit(0.3).unwrap()), ["y"]);
    assert_eq!(ids(q.emit(1.5).unwrap()), ["x"]);
    assert!(matches!(q.emit(1.0), Err(ScoreError::TimeRegression { .. })));
    assert_eq!(ids(q.emit(3.5).unwrap()), ["z"]);
    assert!(q.is_empty());
}

#[test]
fn zero_bids_are_fcfs() {
    let p = ScoreParams::default();
    let mut q = PendingQueue::new(p);
    for (i, t) in [0.0, 0.1, 0.2].iter().enumerate() {
        q.push(tx(&format!("t{i}"), *t, 0.0)).unwrap();
    }
    let out: Vec<_> = q.emit(0.7).unwrap().iter().map(|t| t.id().to_string()).collect();
    assert_eq!(out, ["t0", "t1", "t2"]);
}

#[test]
fn feed_round_trip_from_fixture() {
    let file = std::fs::File::open(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/three_tx.jsonl")).unwrap();
    let txs = read_transactions(std::io::BufReader::new(file)).unwrap();
    let p = ScoreParams::default();
    let mut buf = Vec::new();
    write_feed(&mut buf, &txs, &p).unwrap();
    let parsed: Vec<FeedEntry> =
        String::from_utf8(buf).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(parsed, feed_entries(&txs, &p));
    let ids: Vec<_> = parsed.iter().map(|e| e.id.as_str()).collect();
    // b: 0.5 - 0.1 = 0.4, a: 0, c: 0.25 - 0.3 = -0.05
    assert_eq!(ids, ["b", "a", "c"]);
    assert_eq!(parsed.iter().map(|e| e.position).collect::<Vec<_>>(), [0, 1, 2]);
}

#[test]
fn bad_lines_report_their_number() {
    let input = "{\"id\":\"a\",\"t\":0,\"bid\":0}\n\n{\"id\":\"b\",\"t\":0,\"bid\":-2}\n";
    let err = read_transactions(input.as_bytes()).unwrap_err();
    assert_eq!(err.line(), Some(3));
    let err = read_transactions("{\"id\":\"a\",\"t\":0}\n".as_bytes()).unwrap_err();
    assert_eq!(err.line(), Some(1));
    let dup = "{\"id\":\"a\",\"t\":0,\"bid\":0}\n{\"id\":\"a\",\"t\":1,\"bid\":0}\n";
    assert_eq!(read_transactions(dup.as_bytes()).unwrap_err().line(), Some(2));
    assert!(read_transactions("".as_bytes()).unwrap().is_empty());
}

fn arb_tx() -> impl Strategy<Value = (i64, f64)> {
    (0i64..5_000_000, prop_oneof![Just(0.0), 0.0f64..10.0, 1e3f64..1e9])
}

proptest! {
    #[test]
    fn order_is_sorted_and_permutation_invariant(specs in prop::collection::vec(arb_tx(), 0..40), seed in any::<u64>()) {
        let p = ScoreParams::default();
        let txs: Vec<Transaction> = specs
            .iter()
            .enumerate()
            .map(|(i, &(t, b))| Transaction::at(format!("{i:03}"), Micros(t), b, vec![]).unwrap())
            .collect();
        let out = order(&txs, &p);
        prop_assert_eq!(out.len(), txs.len());
        for w in out.windows(2) {
            prop_assert!(score(&w[0], &p).value() >= score(&w[1], &p).value());
        }
        let mut shuffled = txs.clone();
        let k = shuffled.len().max(1);
        shuffled.rotate_left((seed as usize) % k);
        shuffled.reverse();
        prop_assert_eq!(order(&shuffled, &p), out);
    }

    #[test]
    fn queue_emits_like_order(specs in prop::collection::vec(arb_tx(), 1..40)) {
        let p = ScoreParams::default();
        let txs: Vec<Transaction> = specs
            .iter()
            .enumerate()
            .map(|(i, &(t, b))| Transaction::at(format!("{i:03}"), Micros(t), b, vec![]).unwrap())
            .collect();
        let mut q = PendingQueue::new(p);
        for t in &txs {
            q.push(t.clone()).unwrap();
        }
        let out = q.emit(1e6).unwrap();
        prop_assert_eq!(out, order(&txs, &p));
    }

    #[test]
    fn release_is_g_minus_score(t in 0.0f64..1e4, b in 0.0f64..1e6, g in 0.01f64..10.0, c in 0.01f64..10.0) {
        let p = ScoreParams::new(g, c).unwrap();
        let x = Transaction::new("x", t, b, vec![]).unwrap();
        prop_assert!((release_time(&x, &p) - (g - score(&x, &p).value())).abs() < 1e-9);
        prop_assert!(release_time(&x, &p) > x.arrival_secs() - 1e-12);
    }
}
