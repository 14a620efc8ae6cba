//! Plaintext transaction formats and client-side submission.

use super::crypto::ThresholdScheme;
use super::types::EncTx;

const USER_TAG: u8 = 0x01;
const DELAYED_TAG: u8 = 0x00;

/// Decrypted transaction contents.
#[derive(Debug, Clone, PartialEq)]
pub enum Plaintext {
    /// User transaction carrying the fee it actually pays.
    User { fee: f64, body: Vec<u8> },
    /// Message from the L1 delayed inbox.
    Delayed { index: u64, body: Vec<u8> },
}

impl Plaintext {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            Plaintext::User { fee, body } => {
                out.push(USER_TAG);
                out.extend_from_slice(&fee.to_bits().to_be_bytes());
                out.extend_from_slice(body);
            }
            Plaintext::Delayed { index, body } => {
                out.push(DELAYED_TAG);
                out.extend_from_slice(&index.to_be_bytes());
                out.extend_from_slice(body);
            }
        }
        out
    }

    /// `None` if the bytes are not a well-formed transaction.
    pub fn decode(bytes: &[u8]) -> Option<Self> {
        let (&tag, rest) = bytes.split_first()?;
        if rest.len() < 8 {
            return None;
        }
        let (word, body) = rest.split_at(8);
        let word = u64::from_be_bytes(word.try_into().ok()?);
        match tag {
            USER_TAG => {
                let fee = f64::from_bits(word);
                (fee.is_finite() && fee >= 0.0).then(|| Plaintext::User { fee, body: body.to_vec() })
            }
            DELAYED_TAG => Some(Plaintext::Delayed { index: word, body: body.to_vec() }),
            _ => None,
        }
    }
}

/// Encrypts a user transaction paying `fee` while declaring `declared`.
/// A mismatch is only caught after decryption.
pub fn submit_user(fee: f64, body: &[u8], declared: f64, scheme: &dyn ThresholdScheme) -> EncTx {
    let plain = Plaintext::User { fee, body: body.to_vec() }.encode();
    EncTx::new(scheme.encrypt(&plain), declared)
}

/// Delayed-inbox messages travel unencrypted with a zero fee.
pub fn submit_delayed(index: u64, body: &[u8]) -> EncTx {
    EncTx::new(Plaintext::Delayed { index, body: body.to_vec() }.encode(), 0.0)
}
