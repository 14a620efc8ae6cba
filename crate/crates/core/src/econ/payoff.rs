//! Payoff equivalence of all-pay and winner-pays first-price bidding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::ValuationModel;
use super::numeric::adaptive_simpson;
use super::EconError;

pub const MIN_TRIALS: usize = 10_000;
const TABLE: usize = 4097;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffReport {
    pub n: u32,
    pub trials: usize,
    /// Expected payoff per player, all-pay format.
    pub all_pay: f64,
    pub all_pay_se: f64,
    /// Expected payoff per player, winner-pays format.
    pub first_price: f64,
    pub first_price_se: f64,
    /// Standard error of the paired difference.
    pub diff_se: f64,
}

impl PayoffReport {
    pub fn difference(&self) -> f64 {
        self.all_pay - self.first_price
    }
}

/// Equilibrium payment tables on a uniform valuation grid.
struct BidTables {
    all_pay: Vec<f64>,
    first_price: Vec<f64>,
}

impl BidTables {
    fn build(model: &dyn ValuationModel, n: u32) -> Self {
        let k = n as i32 - 1;
        let mut all_pay = vec![0.0; TABLE];
        let mut first_price = vec![0.0; TABLE];
        let (mut ap, mut lower) = (0.0, 0.0);
        for i in 1..TABLE {
            let (a, b) = ((i - 1) as f64 / (TABLE - 1) as f64, i as f64 / (TABLE - 1) as f64);
            // all-pay: ∫ x d(F^(n-1)); winner pays E[max others | below v]
            ap += adaptive_simpson(
                |x| if k == 0 { 0.0 } else { k as f64 * x * model.pdf(x) * model.cdf(x).powi(k - 1) },
                a,
                b,
                1e-14,
            );
            lower += adaptive_simpson(|x| model.cdf(x).powi(k), a, b, 1e-14);
            all_pay[i] = ap;
            let win = model.cdf(b).powi(k);
            first_price[i] = if win > 0.0 { b - lower / win } else { 0.0 };
        }
        BidTables { all_pay, first_price }
    }

    fn lookup(table: &[f64], v: f64) -> f64 {
        let pos = v.clamp(0.0, 1.0) * (TABLE - 1) as f64;
        let i = (pos.floor() as usize).min(TABLE - 2);
        let frac = pos - i as f64;
        table[i] * (1.0 - frac) + table[i + 1] * frac
    }
}

/// Simulates `trials` contests of `n` players in both formats on the same
/// valuation draws.
pub fn payoff_equivalence_mc(
    model: &dyn ValuationModel,
    n: u32,
    trials: usize,
    seed: u64,
) -> Result<PayoffReport, EconError> {
    if trials < MIN_TRIALS {
        return Err(EconError::TooFewTrials { got: trials, min: MIN_TRIALS });
    }
    if n == 0 {
        return Err(EconError::InvalidParameter("need at least one player".into()));
    }
    let tables = BidTables::build(model, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vals = vec![0.0; n as usize];
    let (mut ap, mut ap2, mut fp, mut fp2, mut d, mut d2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..trials {
        for v in vals.iter_mut() {
            *v = model.sample(&mut rng);
        }
        let winner = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
        let (mut ap_t, mut fp_t) = (0.0, 0.0);
        for (i, &v) in vals.iter().enumerate() {
            let prize = if i == winner { v } else { 0.0 };
            ap_t += prize - BidTables::lookup(&tables.all_pay, v);
            if i == winner {
                fp_t += v - BidTables::lookup(&tables.first_price, v);
            }
        }
        let nf = n as f64;
        let (a, f) = (ap_t / nf, fp_t / nf);
        ap += a;
        ap2 += a * a;
        fp += f;
        fp2 += f * f;
        d += a - f;
        d2 += (a - f) * (a - f);
    }
    let t = trials as f64;
    let se = |s: f64, s2: f64| ((s2 / t - (s / t).powi(2)).max(0.0) / (t - 1.0)).sqrt();
    Ok(PayoffReport {
        n,
        trials,
        all_pay: ap / t,
        all_pay_se: se(ap, ap2),
        first_price: fp / t,
        first_price_se: se(fp, fp2),
        diff_se: se(d, d2),
    })
}
