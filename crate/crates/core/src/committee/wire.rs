//! Broadcast messages and their length-prefixed binary encoding.
//!
//! Record: `u32 length ‖ u8 tag ‖ fields`. Integers are big-endian, byte
//! strings carry a `u32` length, floats are encoded as their IEEE-754 bits.

use thiserror::Error;

use super::types::{Digest, EncTx, SequencerId, TimestampTriple};
use crate::score::Micros;

#[derive(Debug, Clone, PartialEq)]
pub enum BroadcastMsg {
    LocalTimestamp {
        epoch: u64,
        id: SequencerId,
        tx: EncTx,
        ts: TimestampTriple,
    },
    DecryptionShare {
        epoch: u64,
        id: SequencerId,
        hash: Digest,
        share: Vec<u8>,
        tau_prime: f64,
    },
    BlockSignature {
        epoch: u64,
        id: SequencerId,
        height: u64,
        digest: Digest,
        sig: Vec<u8>,
    },
    BatchSignature {
        epoch: u64,
        id: SequencerId,
        block_number: u64,
        digest: Digest,
        sig: Vec<u8>,
    },
    NewEpoch {
        b: u64,
        txid: Digest,
    },
    Recover {
        id: SequencerId,
        nonce: u64,
    },
    StateHash {
        from: SequencerId,
        recovering: SequencerId,
        nonce: u64,
        digest: Digest,
    },
    /// Advances the sender's maximum timestamp without a transaction.
    Heartbeat {
        epoch: u64,
        id: SequencerId,
        ts: TimestampTriple,
    },
}

impl BroadcastMsg {
    pub fn tag(&self) -> u8 {
        match self {
            BroadcastMsg::LocalTimestamp { .. } => 0,
            BroadcastMsg::DecryptionShare { .. } => 1,
            BroadcastMsg::BlockSignature { .. } => 2,
            BroadcastMsg::BatchSignature { .. } => 3,
            BroadcastMsg::NewEpoch { .. } => 4,
            BroadcastMsg::Recover { .. } => 5,
            BroadcastMsg::StateHash { .. } => 6,
            BroadcastMsg::Heartbeat { .. } => 7,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BroadcastMsg::LocalTimestamp { .. } => "local_timestamp",
            BroadcastMsg::DecryptionShare { .. } => "decryption_share",
            BroadcastMsg::BlockSignature { .. } => "block_signature",
            BroadcastMsg::BatchSignature { .. } => "batch_signature",
            BroadcastMsg::NewEpoch { .. } => "new_epoch",
            BroadcastMsg::Recover { .. } => "recover",
            BroadcastMsg::StateHash { .. } => "state_hash",
            BroadcastMsg::Heartbeat { .. } => "heartbeat",
        }
    }

    /// Identity the message claims to come from, if any.
    pub fn claimed_sender(&self) -> Option<SequencerId> {
        match self {
            BroadcastMsg::LocalTimestamp { id, .. }
            | BroadcastMsg::DecryptionShare { id, .. }
            | BroadcastMsg::BlockSignature { id, .. }
            | BroadcastMsg::BatchSignature { id, .. }
            | BroadcastMsg::Recover { id, .. }
            | BroadcastMsg::Heartbeat { id, .. } => Some(*id),
            BroadcastMsg::StateHash { from, .. } => Some(*from),
            BroadcastMsg::NewEpoch { .. } => None,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer(vec![0; 4]);
        w.u8(self.tag());
        match self {
            BroadcastMsg::LocalTimestamp { epoch, id, tx, ts } => {
                w.u64(*epoch);
                w.u32(*id);
                w.bytes(&tx.ciphertext);
                w.f64(tx.fee);
                w.triple(ts);
            }
            BroadcastMsg::DecryptionShare { epoch, id, hash, share, tau_prime } => {
                w.u64(*epoch);
                w.u32(*id);
                w.digest(hash);
                w.bytes(share);
                w.f64(*tau_prime);
            }
            BroadcastMsg::BlockSignature { epoch, id, height, digest, sig } => {
                w.u64(*epoch);
                w.u32(*id);
                w.u64(*height);
                w.digest(digest);
                w.bytes(sig);
            }
            BroadcastMsg::BatchSignature { epoch, id, block_number, digest, sig } => {
                w.u64(*epoch);
                w.u32(*id);
                w.u64(*block_number);
                w.digest(digest);
                w.bytes(sig);
            }
            BroadcastMsg::NewEpoch { b, txid } => {
                w.u64(*b);
                w.digest(txid);
            }
            BroadcastMsg::Recover { id, nonce } => {
                w.u32(*id);
                w.u64(*nonce);
            }
            BroadcastMsg::StateHash { from, recovering, nonce, digest } => {
                w.u32(*from);
                w.u32(*recovering);
                w.u64(*nonce);
                w.digest(digest);
            }
            BroadcastMsg::Heartbeat { epoch, id, ts } => {
                w.u64(*epoch);
                w.u32(*id);
                w.triple(ts);
            }
        }
        let len = (w.0.len() - 4) as u32;
        w.0[..4].copy_from_slice(&len.to_be_bytes());
        w.0
    }

    /// Decodes one record, returning it and the bytes consumed.
    pub fn decode(buf: &[u8]) -> Result<(Self, usize), WireError> {
        let mut r = Reader { buf, pos: 0 };
        let len = r.u32()? as usize;
        let end = 4usize.checked_add(len).ok_or(WireError::Truncated)?;
        if buf.len() < end {
            return Err(WireError::Truncated);
        }
        let mut r = Reader { buf: &buf[..end], pos: 4 };
        let tag = r.u8()?;
        let msg = match tag {
            0 => {
                let (epoch, id) = (r.u64()?, r.u32()?);
                let ct = r.bytes()?;
                let fee = r.f64()?;
                BroadcastMsg::LocalTimestamp { epoch, id, tx: EncTx::new(ct, fee), ts: r.triple()? }
            }
            1 => BroadcastMsg::DecryptionShare {
                epoch: r.u64()?,
                id: r.u32()?,
                hash: r.digest()?,
                share: r.bytes()?,
                tau_prime: r.f64()?,
            },
            2 => BroadcastMsg::BlockSignature {
                epoch: r.u64()?,
                id: r.u32()?,
                height: r.u64()?,
                digest: r.digest()?,
                sig: r.bytes()?,
            },
            3 => BroadcastMsg::BatchSignature {
                epoch: r.u64()?,
                id: r.u32()?,
                block_number: r.u64()?,
                digest: r.digest()?,
                sig: r.bytes()?,
            },
            4 => BroadcastMsg::NewEpoch { b: r.u64()?, txid: r.digest()? },
            5 => BroadcastMsg::Recover { id: r.u32()?, nonce: r.u64()? },
            6 => BroadcastMsg::StateHash { from: r.u32()?, recovering: r.u32()?, nonce: r.u64()?, digest: r.digest()? },
            7 => BroadcastMsg::Heartbeat { epoch: r.u64()?, id: r.u32()?, ts: r.triple()? },
            t => return Err(WireError::UnknownTag(t)),
        };
        if r.pos != end {
            return Err(WireError::TrailingBytes(end - r.pos));
        }
        Ok((msg, end))
    }

    /// Decodes a concatenation of records.
    pub fn decode_all(mut buf: &[u8]) -> Result<Vec<Self>, WireError> {
        let mut out = Vec::new();
        while !buf.is_empty() {
            let (msg, used) = Self::decode(buf)?;
            out.push(msg);
            buf = &buf[used..];
        }
        Ok(out)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WireError {
    #[error("record truncated")]
    Truncated,
    #[error("unknown message tag {0}")]
    UnknownTag(u8),
    #[error("{0} unread bytes at end of record")]
    TrailingBytes(usize),
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_be_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_be_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }
    fn digest(&mut self, d: &Digest) {
        self.0.extend_from_slice(&d.0);
    }
    fn bytes(&mut self, b: &[u8]) {
        self.u32(b.len() as u32);
        self.0.extend_from_slice(b);
    }
    fn triple(&mut self, t: &TimestampTriple) {
        self.u64(t.t.0 as u64);
        self.u32(t.id);
        self.u64(t.seq);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], WireError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or(WireError::Truncated)?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64(&mut self) -> Result<f64, WireError> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn digest(&mut self) -> Result<Digest, WireError> {
        Ok(Digest(self.take(32)?.try_into().expect("32 bytes")))
    }
    fn bytes(&mut self) -> Result<Vec<u8>, WireError> {
        let n = self.u32()? as usize;
        Ok(self.take(n)?.to_vec())
    }
    fn triple(&mut self) -> Result<TimestampTriple, WireError> {
        Ok(TimestampTriple { t: Micros(self.u64()? as i64), id: self.u32()?, seq: self.u64()? })
    }
}
