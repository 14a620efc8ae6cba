//! JSON-lines transaction input and ordered feed output.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{order, release_time, score, ScoreError, ScoreParams, Transaction};

#[derive(Debug, Error)]
pub enum FeedError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: payload is not valid hex: {source}")]
    Hex { line: usize, source: hex::FromHexError },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: ScoreError },
    #[error("line {line}: duplicate transaction id {id:?}")]
    Duplicate { line: usize, id: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FeedError {
    pub fn line(&self) -> Option<usize> {
        match self {
            FeedError::Json { line, .. }
            | FeedError::Hex { line, .. }
            | FeedError::Invalid { line, .. }
            | FeedError::Duplicate { line, .. } => Some(*line),
            FeedError::Io(_) => None,
        }
    }
}

/// One line of the transaction input file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TxRecord {
    pub id: String,
    pub t: f64,
    pub bid: f64,
    #[serde(default)]
    pub payload: String,
}

/// One line of the ordered output feed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedEntry {
    pub id: String,
    pub score: f64,
    pub release_time: f64,
    pub position: usize,
}

pub fn read_transactions<R: BufRead>(reader: R) -> Result<Vec<Transaction>, FeedError> {
    let mut out = Vec::new();
    let mut ids = std::collections::HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TxRecord = serde_json::from_str(&line).map_err(|source| FeedError::Json { line: line_no, source })?;
        let payload = hex::decode(rec.payload.trim_start_matches("0x"))
            .map_err(|source| FeedError::Hex { line: line_no, source })?;
        let tx = Transaction::new(rec.id, rec.t, rec.bid, payload)
            .map_err(|source| FeedError::Invalid { line: line_no, source })?;
        if !ids.insert(tx.id().to_string()) {
            return Err(FeedError::Duplicate { line: line_no, id: tx.id().to_string() });
        }
        out.push(tx);
    }
    Ok(out)
}

/// Orders `txs` and builds the feed entries.
pub fn feed_entries(txs: &[Transaction], params: &ScoreParams) -> Vec<FeedEntry> {
    order(txs, params)
        .iter()
        .enumerate()
        .map(|(position, tx)| FeedEntry {
            id: tx.id().to_string(),
            score: score(tx, params).0,
            release_time: release_time(tx, params),
            position,
        })
        .collect()
}

pub fn write_feed<W: Write>(mut w: W, txs: &[Transaction], params: &ScoreParams) -> Result<(), FeedError> {
    for entry in feed_entries(txs, params) {
        serde_json::to_writer(&mut w, &entry).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_orders() {
        let input = r#"{"id":"a","t":0.0,"bid":0.0,"payload":"00ff"}
{"id":"b","t":0.1,"bid":1000000000.0,"payload":""}

{"id":"c","t":0.2,"bid":0.0}
"#;
        let txs = read_transactions(input.as_bytes()).unwrap();
        assert_eq!(txs.len(), 3);
        assert_eq!(txs[0].payload(), &[0x00, 0xff]);
        let feed = feed_entries(&txs, &ScoreParams::default());
        let ids: Vec<_> = feed.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["b", "a", "c"]);
        assert_eq!(feed[1].release_time, 0.5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let input = "{\"id\":\"a\",\"t\":0.0,\"bid\":0.0}\n{\"id\":\"b\",\"t\":1.0,\"bid\":-2.0}\n";
        let err = read_transactions(input.as_bytes()).unwrap_err();
        assert_eq!(err.line(), Some(2));
        let err = read_transactions("not json\n".as_bytes()).unwrap_err();
        assert_eq!(err.line(), Some(1));
        let err = read_transactions("{\"id\":\"a\",\"t\":0,\"bid\":0,\"payload\":\"zz\"}".as_bytes()).unwrap_err();
        assert!(matches!(err, FeedError::Hex { line: 1, .. }));
        let dup = "{\"id\":\"a\",\"t\":0,\"bid\":0}\n{\"id\":\"a\",\"t\":1,\"bid\":0}";
        assert!(matches!(read_transactions(dup.as_bytes()), Err(FeedError::Duplicate { line: 2, .. })));
    }

    #[test]
    fn empty_input_empty_feed() {
        let txs = read_transactions("".as_bytes()).unwrap();
        let mut out = Vec::new();
        write_feed(&mut out, &txs, &ScoreParams::default()).unwrap();
        assert!(out.is_empty());
    }
}
