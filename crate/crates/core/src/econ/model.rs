//! Valuation distributions and cost technologies.

use rand::Rng;

use super::numeric::bisect_increasing;
use super::EconError;

/// Distribution of a player's private valuation on `[0, 1]`.
pub trait ValuationModel: Send + Sync {
    fn cdf(&self, x: f64) -> f64;
    fn pdf(&self, x: f64) -> f64;
    fn mean(&self) -> f64;
    fn sample(&self, rng: &mut dyn rand::RngCore) -> f64;
}

/// `F(x) = x` on `[0, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Uniform;

impl ValuationModel for Uniform {
    fn cdf(&self, x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }
    fn pdf(&self, x: f64) -> f64 {
        if (0.0..=1.0).contains(&x) {
            1.0
        } else {
            0.0
        }
    }
    fn mean(&self) -> f64 {
        0.5
    }
    fn sample(&self, rng: &mut dyn rand::RngCore) -> f64 {
        rng.random::<f64>()
    }
}

/// `F(x) = x^k` on `[0, 1]`, `k > 0`.
#[derive(Debug, Clone, Copy)]
pub struct PowerLaw {
    k: f64,
}

impl PowerLaw {
    pub fn new(k: f64) -> Result<Self, EconError> {
        if !(k.is_finite() && k > 0.0) {
            return Err(EconError::InvalidParameter(format!("power-law exponent must be > 0, got {k}")));
        }
        Ok(PowerLaw { k })
    }
}

impl ValuationModel for PowerLaw {
    fn cdf(&self, x: f64) -> f64 {
        x.clamp(0.0, 1.0).powf(self.k)
    }
    fn pdf(&self, x: f64) -> f64 {
        if (0.0..=1.0).contains(&x) && x > 0.0 {
            self.k * x.powf(self.k - 1.0)
        } else {
            0.0
        }
    }
    fn mean(&self) -> f64 {
        self.k / (self.k + 1.0)
    }
    fn sample(&self, rng: &mut dyn rand::RngCore) -> f64 {
        rng.random::<f64>().powf(1.0 / self.k)
    }
}

/// Point mass at `value`. Used for degenerate-input checks.
#[derive(Debug, Clone, Copy)]
pub struct PointMass(pub f64);

impl ValuationModel for PointMass {
    fn cdf(&self, x: f64) -> f64 {
        if x >= self.0 {
            1.0
        } else {
            0.0
        }
    }
    fn pdf(&self, _x: f64) -> f64 {
        0.0
    }
    fn mean(&self) -> f64 {
        self.0
    }
    fn sample(&self, _rng: &mut dyn rand::RngCore) -> f64 {
        self.0
    }
}

/// Latency cost `scale / t` for delivering a transaction `t` seconds after
/// the opportunity appears.
#[derive(Debug, Clone, Copy)]
pub struct LatencyTech {
    pub scale: f64,
}

impl Default for LatencyTech {
    fn default() -> Self {
        LatencyTech { scale: 1.0 }
    }
}

impl LatencyTech {
    pub fn cost(&self, delay: f64) -> f64 {
        self.scale / delay
    }

    /// Delay bought with `spend`; zero spend means waiting forever.
    pub fn delay_for(&self, spend: f64) -> f64 {
        if spend <= 0.0 {
            f64::INFINITY
        } else {
            self.scale / spend
        }
    }
}

/// Increasing, differentiable cost `C(s)` of producing the score `s`.
pub trait SignalTech {
    fn cost(&self, s: f64) -> f64;
    fn marginal(&self, s: f64) -> f64;
    /// Scores must stay strictly below this bound.
    fn upper_bound(&self) -> f64 {
        f64::INFINITY
    }
    /// Scores below this bound are not producible.
    fn lower_bound(&self) -> f64 {
        f64::NEG_INFINITY
    }

    /// Score whose cost is `spend`, found by bracketing and bisection.
    fn inverse(&self, spend: f64) -> Result<f64, EconError> {
        if !spend.is_finite() {
            return Err(EconError::SolverFailure(format!("cannot invert cost at {spend}")));
        }
        let hi_bound = self.upper_bound();
        let lo_bound = self.lower_bound();
        let mut lo = if lo_bound.is_finite() { lo_bound } else { -1.0 };
        let mut width = 1.0;
        while self.cost(lo) > spend {
            if lo_bound.is_finite() {
                return Err(EconError::SolverFailure(format!("spend {spend} is below the cheapest score")));
            }
            width *= 2.0;
            lo = -width;
            if width > 1e300 {
                return Err(EconError::SolverFailure(format!("no score costs as little as {spend}")));
            }
        }
        let mut hi = if hi_bound.is_finite() { lo.max(hi_bound - 1.0) } else { lo + 1.0 };
        let mut gap = 1.0;
        while self.cost(hi) < spend {
            if hi_bound.is_finite() {
                gap *= 0.5;
                hi = hi_bound - gap;
                if gap < 1e-300 {
                    return Err(EconError::SolverFailure(format!("no score reaches spend {spend}")));
                }
            } else {
                gap *= 2.0;
                hi = lo + gap;
                if gap > 1e300 {
                    return Err(EconError::SolverFailure(format!("no score reaches spend {spend}")));
                }
            }
        }
        Ok(bisect_increasing(|s| self.cost(s), spend, lo, hi))
    }
}

/// Cost of a score under the time-boost rule with `c = 1` and latency cost
/// `1/t`: the cheapest mix of bid and latency.
#[derive(Debug, Clone, Copy)]
pub struct TimeBoostSignal {
    pub g: f64,
}

impl SignalTech for TimeBoostSignal {
    fn cost(&self, s: f64) -> f64 {
        super::expost::signal_cost_unchecked(s, self.g)
    }
    fn marginal(&self, s: f64) -> f64 {
        let r = self.g.sqrt();
        if s > -r {
            (1.0 + r).powi(2) / (self.g - s).powi(2)
        } else {
            1.0 / (s * s)
        }
    }
    fn upper_bound(&self) -> f64 {
        self.g
    }
    fn inverse(&self, spend: f64) -> Result<f64, EconError> {
        if !(spend.is_finite() && spend > 0.0) {
            return Err(EconError::SolverFailure(format!("cannot invert time-boost cost at {spend}")));
        }
        let r = self.g.sqrt();
        if spend <= 1.0 / r {
            Ok(-1.0 / spend)
        } else {
            Ok((spend * self.g - 1.0 - 2.0 * r) / (1.0 + spend))
        }
    }
}

/// `C(s) = s + shift` for `s >= -shift`.
#[derive(Debug, Clone, Copy)]
pub struct LinearSignal {
    pub shift: f64,
}

impl SignalTech for LinearSignal {
    fn cost(&self, s: f64) -> f64 {
        s + self.shift
    }
    fn marginal(&self, _s: f64) -> f64 {
        1.0
    }
    fn lower_bound(&self) -> f64 {
        -self.shift
    }
}

/// `C(s) = exp(s)`.
#[derive(Debug, Clone, Copy)]
pub struct ExpSignal;

impl SignalTech for ExpSignal {
    fn cost(&self, s: f64) -> f64 {
        s.exp()
    }
    fn marginal(&self, s: f64) -> f64 {
        s.exp()
    }
}

/// A cost that is constant on an interval and therefore not invertible.
#[derive(Debug, Clone, Copy)]
pub struct FlatSignal;

impl SignalTech for FlatSignal {
    fn cost(&self, _s: f64) -> f64 {
        1.0
    }
    fn marginal(&self, _s: f64) -> f64 {
        0.0
    }
}
