//! Block-to-block batch auctions versus continuous time boosting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::EconError;
use crate::score::{time_boost, ScoreParams};

/// Ethereum slot length in seconds, the reference batch interval.
pub const ETHEREUM_SLOT_SECS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BidDistribution {
    Zero,
    Uniform { max: f64 },
    Exponential { mean: f64 },
}

impl BidDistribution {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            BidDistribution::Zero => 0.0,
            BidDistribution::Uniform { max } => rng.random_range(0.0..=max),
            BidDistribution::Exponential { mean } => Exp::new(1.0 / mean).map(|d| d.sample(rng)).unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub g: f64,
    pub s1: f64,
    pub s2: f64,
    /// Fraction of each batch interval in which the slower party cannot win.
    pub window_fraction: f64,
    /// Same window with 12 s batches.
    pub ethereum_window_fraction: f64,
    /// How much more latency matters with `g`-second batches than with 12 s.
    pub ethereum_factor: f64,
    pub batch_avg_delay: f64,
    pub batch_delay_se: f64,
    pub continuous_avg_delay: f64,
    pub trials: usize,
}

pub fn block_auction_compare(
    params: &ScoreParams,
    s1: f64,
    s2: f64,
    bids: BidDistribution,
    trials: usize,
    seed: u64,
) -> Result<BenchmarkReport, EconError> {
    params.validate().map_err(|e| EconError::InvalidParameter(e.to_string()))?;
    let g = params.g;
    if !(s1 >= 0.0 && s1 <= s2 && s2 < g) {
        return Err(EconError::OutOfDomain(format!(
            "latencies must satisfy 0 <= s1 <= s2 < g, got s1={s1}, s2={s2}, g={g}"
        )));
    }
    if trials < 2 {
        return Err(EconError::InvalidParameter(format!("need at least 2 trials, got {trials}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = 1000.0 * g;
    let (mut sum, mut sum_sq, mut cont) = (0.0, 0.0, 0.0);
    for _ in 0..trials {
        let arrival: f64 = rng.random_range(0.0..horizon);
        let close = ((arrival / g).floor() + 1.0) * g;
        let d = close - arrival;
        sum += d;
        sum_sq += d * d;
        let bid = bids.sample(&mut rng);
        cont += g - time_boost(bid, params).map_err(|e| EconError::InvalidParameter(e.to_string()))?;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(BenchmarkReport {
        g,
        s1,
        s2,
        window_fraction: (s2 - s1) / g,
        ethereum_window_fraction: (s2 - s1) / ETHEREUM_SLOT_SECS,
        ethereum_factor: ETHEREUM_SLOT_SECS / g,
        batch_avg_delay: mean,
        batch_delay_se: (var / n).sqrt(),
        continuous_avg_delay: cont / n,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_and_factor() {
        let r = block_auction_compare(&ScoreParams::default(), 0.01, 0.02, BidDistribution::Zero, 1000, 1).unwrap();
        assert!((r.window_fraction - 0.02).abs() < 1e-15);
        assert_eq!(r.ethereum_factor, 24.0);
        let same = block_auction_compare(&ScoreParams::default(), 0.02, 0.02, BidDistribution::Zero, 10, 1).unwrap();
        assert_eq!(same.window_fraction, 0.0);
    }

    #[test]
    fn zero_bids_wait_full_boost() {
        let r = block_auction_compare(&ScoreParams::default(), 0.0, 0.1, BidDistribution::Zero, 1000, 2).unwrap();
        assert_eq!(r.continuous_avg_delay, 0.5);
    }

    #[test]
    fn bids_shorten_continuous_delay() {
        let r =
            block_auction_compare(&ScoreParams::default(), 0.0, 0.1, BidDistribution::Uniform { max: 2.0 }, 100_000, 3)
                .unwrap();
        // E[0.5 - 0.5 b/(b+1)] for b ~ U(0,2) = 0.5 - 0.25 (2 - ln 3)
        let expected = 0.5 - 0.25 * (2.0 - 3f64.ln());
        assert!((r.continuous_avg_delay - expected).abs() < 2e-3);
    }

    #[test]
    fn preconditions() {
        let p = ScoreParams::default();
        assert!(block_auction_compare(&p, 0.2, 0.1, BidDistribution::Zero, 10, 1).is_err());
        assert!(block_auction_compare(&p, 0.1, 0.6, BidDistribution::Zero, 10, 1).is_err());
    }
}
