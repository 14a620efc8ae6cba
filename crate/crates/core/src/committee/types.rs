//! Identifiers, timestamps and encrypted transactions.

use std::cmp::Ordering;
use std::fmt;

use sha2::{Digest as _, Sha256};

use crate::score::Micros;

pub type SequencerId = u32;

/// SHA-256 output.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub fn of(data: &[u8]) -> Self {
        Digest(Sha256::digest(data).into())
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn short(&self) -> String {
        hex::encode(&self.0[..6])
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.short())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Incremental SHA-256 with big-endian field helpers, used for every
/// canonical hash in the committee.
pub struct Hasher(Sha256);

impl Default for Hasher {
    fn default() -> Self {
        Self::new()
    }
}

impl Hasher {
    pub fn new() -> Self {
        Hasher(Sha256::new())
    }

    pub fn bytes(&mut self, b: &[u8]) -> &mut Self {
        self.0.update(b);
        self
    }

    /// Length-prefixed bytes.
    pub fn field(&mut self, b: &[u8]) -> &mut Self {
        self.u64(b.len() as u64).bytes(b)
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.bytes(&[v])
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.bytes(&v.to_be_bytes())
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.bytes(&v.to_be_bytes())
    }

    pub fn i64(&mut self, v: i64) -> &mut Self {
        self.bytes(&v.to_be_bytes())
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.u64(v.to_bits())
    }

    pub fn digest(&mut self, d: &Digest) -> &mut Self {
        self.bytes(&d.0)
    }

    pub fn finish(self) -> Digest {
        Digest(self.0.finalize().into())
    }
}

/// Local timestamp `(t, id, seq)`, totally ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimestampTriple {
    pub t: Micros,
    pub id: SequencerId,
    pub seq: u64,
}

impl TimestampTriple {
    pub fn new(t: Micros, id: SequencerId, seq: u64) -> Self {
        TimestampTriple { t, id, seq }
    }

    pub fn secs(&self) -> f64 {
        self.t.as_secs_f64()
    }

    /// Smallest triple for `id` at `now` that is strictly after `last`.
    pub fn next_after(last: Option<TimestampTriple>, id: SequencerId, now: Micros) -> Self {
        match last {
            Some(l) if now <= l.t => TimestampTriple { t: l.t, id, seq: l.seq + 1 },
            _ => TimestampTriple { t: now, id, seq: 0 },
        }
    }
}

impl Ord for TimestampTriple {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.t, self.id, self.seq).cmp(&(other.t, other.id, other.seq))
    }
}

impl PartialOrd for TimestampTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TimestampTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.t.0, self.id, self.seq)
    }
}

/// Encrypted transaction as broadcast by sequencers.
#[derive(Debug, Clone, PartialEq)]
pub struct EncTx {
    pub ciphertext: Vec<u8>,
    /// Declared priority fee.
    pub fee: f64,
    hash: Digest,
}

impl EncTx {
    pub fn new(ciphertext: Vec<u8>, fee: f64) -> Self {
        let hash = Self::compute_hash(&ciphertext, fee);
        EncTx { ciphertext, fee, hash }
    }

    /// `Hash(ciphertext ‖ fee)`, with the fee as big-endian IEEE-754 bits.
    pub fn compute_hash(ciphertext: &[u8], fee: f64) -> Digest {
        let mut h = Hasher::new();
        h.bytes(ciphertext).f64(fee);
        h.finish()
    }

    pub fn hash(&self) -> Digest {
        self.hash
    }
}
