//! Stand-ins for threshold encryption and signatures.
//!
//! The committee logic only needs the quorum contract: `F+1` distinct valid
//! shares open a ciphertext, and a signature binds a sequencer to a digest.
//! The mocks below satisfy that contract without real cryptography.

use super::types::{Digest, Hasher, SequencerId};

pub const SHARE_LEN: usize = 16;

/// Trailer appended by the mock encryption.
pub const ENC_MARKER: &[u8; 8] = b"\xe7TB-ENC\x01";

pub trait ThresholdScheme {
    fn encrypt(&self, plaintext: &[u8]) -> Vec<u8>;
    fn is_encrypted(&self, ciphertext: &[u8]) -> bool;
    fn share(&self, id: SequencerId, tx_hash: &Digest) -> Vec<u8>;
    fn verify_share(&self, id: SequencerId, tx_hash: &Digest, share: &[u8]) -> bool;
    /// Opens `ciphertext` given at least `threshold` shares that verify.
    fn combine(
        &self,
        ciphertext: &[u8],
        tx_hash: &Digest,
        shares: &[(SequencerId, Vec<u8>)],
        threshold: usize,
    ) -> Option<Vec<u8>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MockThreshold;

impl ThresholdScheme for MockThreshold {
    fn encrypt(&self, plaintext: &[u8]) -> Vec<u8> {
        let mut out = plaintext.to_vec();
        out.extend_from_slice(ENC_MARKER);
        out
    }

    fn is_encrypted(&self, ciphertext: &[u8]) -> bool {
        ciphertext.ends_with(ENC_MARKER)
    }

    fn share(&self, id: SequencerId, tx_hash: &Digest) -> Vec<u8> {
        let mut h = Hasher::new();
        h.bytes(b"share").u32(id).digest(tx_hash);
        h.finish().0[..SHARE_LEN].to_vec()
    }

    fn verify_share(&self, id: SequencerId, tx_hash: &Digest, share: &[u8]) -> bool {
        share == self.share(id, tx_hash).as_slice()
    }

    fn combine(
        &self,
        ciphertext: &[u8],
        tx_hash: &Digest,
        shares: &[(SequencerId, Vec<u8>)],
        threshold: usize,
    ) -> Option<Vec<u8>> {
        if !self.is_encrypted(ciphertext) {
            return Some(ciphertext.to_vec());
        }
        let mut ids: Vec<SequencerId> =
            shares.iter().filter(|(id, s)| self.verify_share(*id, tx_hash, s)).map(|(id, _)| *id).collect();
        ids.sort_unstable();
        ids.dedup();
        (ids.len() >= threshold).then(|| ciphertext[..ciphertext.len() - ENC_MARKER.len()].to_vec())
    }
}

/// Mock signature: a keyed tag over `(id, digest)`.
pub fn sign(id: SequencerId, digest: &Digest) -> Vec<u8> {
    let mut h = Hasher::new();
    h.bytes(b"sig").u32(id).digest(digest);
    h.finish().0[..SHARE_LEN].to_vec()
}

pub fn verify_signature(id: SequencerId, digest: &Digest, sig: &[u8]) -> bool {
    sig == sign(id, digest).as_slice()
}
