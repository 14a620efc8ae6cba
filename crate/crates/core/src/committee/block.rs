//! Sequencer blocks, their byte serialization, and batch construction.
//!
//! Serialized block: `0x00 ‖ ts ‖ index` for a delayed-inbox message and
//! `0x01 ‖ ts ‖ size ‖ tx` for a user transaction. `ts` and `index` are
//! 8-byte big-endian, `size` is 4-byte big-endian.

use thiserror::Error;

use super::types::{Digest, Hasher};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("serialized block stream truncated at byte {0}")]
    Truncated(usize),
    #[error("unknown block type {tag:#04x} at byte {at}")]
    UnknownType { tag: u8, at: usize },
    #[error("compressed stream truncated at byte {0}")]
    BadCompression(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BlockContent {
    Delayed { index: u64 },
    Tx(Vec<u8>),
}

/// The serialized part of a block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockEntry {
    /// Whole seconds.
    pub timestamp: u64,
    pub content: BlockContent,
}

impl BlockEntry {
    pub fn serialize_into(&self, out: &mut Vec<u8>) {
        match &self.content {
            BlockContent::Delayed { index } => {
                out.push(0x00);
                out.extend_from_slice(&self.timestamp.to_be_bytes());
                out.extend_from_slice(&index.to_be_bytes());
            }
            BlockContent::Tx(tx) => {
                out.push(0x01);
                out.extend_from_slice(&self.timestamp.to_be_bytes());
                out.extend_from_slice(&(tx.len() as u32).to_be_bytes());
                out.extend_from_slice(tx);
            }
        }
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.serialize_into(&mut out);
        out
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self, BlockError> {
        let (entry, used) = Self::read(bytes, 0)?;
        if used != bytes.len() {
            return Err(BlockError::Truncated(used));
        }
        Ok(entry)
    }

    pub fn deserialize_stream(bytes: &[u8]) -> Result<Vec<Self>, BlockError> {
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < bytes.len() {
            let (entry, next) = Self::read(bytes, pos)?;
            out.push(entry);
            pos = next;
        }
        Ok(out)
    }

    fn read(bytes: &[u8], at: usize) -> Result<(Self, usize), BlockError> {
        let get = |from: usize, n: usize| bytes.get(from..from + n).ok_or(BlockError::Truncated(at));
        let tag = *bytes.get(at).ok_or(BlockError::Truncated(at))?;
        let timestamp = u64::from_be_bytes(get(at + 1, 8)?.try_into().expect("8 bytes"));
        match tag {
            0x00 => {
                let index = u64::from_be_bytes(get(at + 9, 8)?.try_into().expect("8 bytes"));
                Ok((BlockEntry { timestamp, content: BlockContent::Delayed { index } }, at + 17))
            }
            0x01 => {
                let size = u32::from_be_bytes(get(at + 9, 4)?.try_into().expect("4 bytes")) as usize;
                let tx = get(at + 13, size)?.to_vec();
                Ok((BlockEntry { timestamp, content: BlockContent::Tx(tx) }, at + 13 + size))
            }
            tag => Err(BlockError::UnknownType { tag, at }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencerBlock {
    pub height: u64,
    /// Delayed-inbox messages consumed by the chain up to and including this block.
    pub delayed_count: u64,
    pub entry: BlockEntry,
    /// Root over the leaves of every block up to and including this one.
    pub merkle_root: Digest,
}

impl SequencerBlock {
    pub fn timestamp(&self) -> u64 {
        self.entry.timestamp
    }

    /// Merkle leaf contents: `height ‖ delayed_count ‖ serialized entry`.
    pub fn leaf_data(height: u64, delayed_count: u64, entry: &BlockEntry) -> Vec<u8> {
        let mut out = Vec::with_capacity(32);
        out.extend_from_slice(&height.to_be_bytes());
        out.extend_from_slice(&delayed_count.to_be_bytes());
        entry.serialize_into(&mut out);
        out
    }

    /// Digest signed by the committee.
    pub fn digest(&self) -> Digest {
        let mut h = Hasher::new();
        h.bytes(b"block")
            .bytes(&Self::leaf_data(self.height, self.delayed_count, &self.entry))
            .digest(&self.merkle_root);
        h.finish()
    }
}

/// Byte-oriented run-length coding. A control byte `c < 128` is followed by
/// `c + 1` literal bytes; `c >= 128` is followed by one byte repeated
/// `c - 125` times.
pub fn compress(data: &[u8]) -> Vec<u8> {
    const MAX_RUN: usize = 130;
    const MAX_LIT: usize = 128;
    let mut out = Vec::with_capacity(data.len() / 2 + 8);
    let mut lit_start = 0;
    let mut i = 0;
    let flush = |out: &mut Vec<u8>, lit: &[u8]| {
        for chunk in lit.chunks(MAX_LIT) {
            out.push((chunk.len() - 1) as u8);
            out.extend_from_slice(chunk);
        }
    };
    while i < data.len() {
        let b = data[i];
        let mut run = 1;
        while i + run < data.len() && data[i + run] == b && run < MAX_RUN {
            run += 1;
        }
        if run >= 3 {
            flush(&mut out, &data[lit_start..i]);
            out.push((128 + run - 3) as u8);
            out.push(b);
            i += run;
            lit_start = i;
        } else {
            i += run;
        }
    }
    flush(&mut out, &data[lit_start..]);
    out
}

pub fn decompress(data: &[u8]) -> Result<Vec<u8>, BlockError> {
    let mut out = Vec::with_capacity(data.len() * 2);
    let mut i = 0;
    while i < data.len() {
        let c = data[i] as usize;
        if c < 128 {
            let lit = data.get(i + 1..i + 2 + c).ok_or(BlockError::BadCompression(i))?;
            out.extend_from_slice(lit);
            i += 2 + c;
        } else {
            let b = *data.get(i + 1).ok_or(BlockError::BadCompression(i))?;
            out.extend(std::iter::repeat_n(b, c - 125));
            i += 2;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchHeader {
    pub block_number: u64,
    pub merkle_hash: Digest,
    pub delayed_count: u64,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    pub header: BatchHeader,
    /// Compressed concatenation of serialized blocks.
    pub body: Vec<u8>,
    /// Height of the first block in the batch.
    pub first_block: u64,
}

impl Batch {
    pub fn digest(&self) -> Digest {
        let mut h = Hasher::new();
        h.bytes(b"batch")
            .u64(self.header.block_number)
            .digest(&self.header.merkle_hash)
            .u64(self.header.delayed_count)
            .u64(self.header.timestamp)
            .u64(self.first_block)
            .field(&self.body);
        h.finish()
    }

    pub fn entries(&self) -> Result<Vec<BlockEntry>, BlockError> {
        BlockEntry::deserialize_stream(&decompress(&self.body)?)
    }
}

/// Accumulates blocks into batches by time window and compressed size.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchBuilder {
    window: f64,
    max_bytes: usize,
    first_tau: Option<f64>,
    raw: Vec<u8>,
    last: Option<SequencerBlock>,
    first_block: u64,
    compressed_len: usize,
}

impl BatchBuilder {
    pub fn new(window: f64, max_bytes: usize) -> Self {
        BatchBuilder {
            window,
            max_bytes,
            first_tau: None,
            raw: Vec::new(),
            last: None,
            first_block: 0,
            compressed_len: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.last.is_none()
    }

    /// Ordering key of the first block in the open batch.
    pub fn first_tau(&self) -> Option<f64> {
        self.first_tau
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn raw_len(&self) -> usize {
        self.raw.len()
    }

    /// Adds a block with ordering key `tau`. Returns the batch it closed, if
    /// the block did not fit; the block then opens the next batch.
    pub fn push(&mut self, block: &SequencerBlock, tau: f64) -> Option<Batch> {
        let mut closed = None;
        if let Some(first) = self.first_tau {
            let mut grown = self.raw.clone();
            block.entry.serialize_into(&mut grown);
            let grown_len = compress(&grown).len();
            if tau - first > self.window || grown_len > self.max_bytes {
                closed = self.close();
            } else {
                self.raw = grown;
                self.compressed_len = grown_len;
                self.last = Some(block.clone());
                return None;
            }
        }
        self.first_tau = Some(tau);
        self.first_block = block.height;
        self.raw.clear();
        block.entry.serialize_into(&mut self.raw);
        self.compressed_len = compress(&self.raw).len();
        self.last = Some(block.clone());
        closed
    }

    pub fn close(&mut self) -> Option<Batch> {
        let last = self.last.take()?;
        self.first_tau = None;
        let body = compress(&self.raw);
        self.raw.clear();
        Some(Batch {
            header: BatchHeader {
                block_number: last.height,
                merkle_hash: last.merkle_root,
                delayed_count: last.delayed_count,
                timestamp: last.timestamp(),
            },
            body,
            first_block: self.first_block,
        })
    }

    pub(crate) fn hash_into(&self, h: &mut Hasher) {
        h.f64(self.window).u64(self.max_bytes as u64).u64(self.first_block).field(&self.raw);
        match self.first_tau {
            Some(t) => h.u8(1).f64(t),
            None => h.u8(0),
        };
        match &self.last {
            Some(b) => h.u8(1).digest(&b.digest()),
            None => h.u8(0),
        };
    }
}
