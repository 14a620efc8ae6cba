//! Ex-post model: players see their valuation, then buy latency and bid.

use super::model::{SignalTech, TimeBoostSignal, Uniform, ValuationModel};
use super::numeric::{adaptive_simpson, bisect_increasing, rk4, Rk4Solution};
use super::EconError;

/// RK4 step on the valuation axis.
pub const ODE_STEP: f64 = 1e-3;
const QUAD_TOL: f64 = 1e-12;

/// Latency-only best response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyOnly {
    /// `None` for the zero type, which waits forever.
    pub delay: Option<f64>,
    pub spend: f64,
}

/// Equilibrium delay `n / ((n-1) v^n)` when latency is the only technology.
pub fn expost_latency_only(v: f64, n: u32) -> Result<LatencyOnly, EconError> {
    if n < 2 {
        return Err(EconError::InvalidParameter(format!("need at least 2 players, got {n}")));
    }
    if !(0.0..=1.0).contains(&v) {
        return Err(EconError::OutOfDomain(format!("valuation {v} outside [0, 1]")));
    }
    if v == 0.0 {
        return Ok(LatencyOnly { delay: None, spend: 0.0 });
    }
    let n = n as f64;
    let spend = (n - 1.0) * v.powf(n) / n;
    Ok(LatencyOnly { delay: Some(1.0 / spend), spend })
}

/// Cheapest spend that produces score `s`:
/// `(1 + 2 sqrt(g) + s)/(g - s)` above `-sqrt(g)`, `-1/s` below.
pub fn signal_cost(s: f64, g: f64) -> Result<f64, EconError> {
    if !(g.is_finite() && g > 0.0) {
        return Err(EconError::InvalidParameter(format!("boost g must be > 0, got {g}")));
    }
    if s.is_nan() || s >= g {
        return Err(EconError::InfeasibleScore { s, g });
    }
    Ok(signal_cost_unchecked(s, g))
}

pub(crate) fn signal_cost_unchecked(s: f64, g: f64) -> f64 {
    let r = g.sqrt();
    if s > -r {
        (1.0 + 2.0 * r + s) / (g - s)
    } else {
        -1.0 / s
    }
}

/// Cost-minimizing bid and delay for score `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub bid: f64,
    pub delay: f64,
}

impl Split {
    pub fn latency_spend(&self) -> f64 {
        1.0 / self.delay
    }

    pub fn total(&self) -> f64 {
        self.bid + 1.0 / self.delay
    }
}

pub fn expost_optimal_split(s: f64, g: f64) -> Result<Split, EconError> {
    signal_cost(s, g)?;
    Ok(split_unchecked(s, g))
}

fn split_unchecked(s: f64, g: f64) -> Split {
    let r = g.sqrt();
    if s <= -r {
        return Split { bid: 0.0, delay: -s };
    }
    let bid = (s + r) / (g - s);
    // t = g m/(m+1) - s, with m/(m+1) = (s + r)/(g + r)
    let delay = g * (s + r) / (g + r) - s;
    Split { bid, delay }
}

/// Marginal type `(n / ((n-1) sqrt(g)))^(1/n)`: the lowest valuation that bids.
pub fn marginal_type(g: f64, n: u32) -> f64 {
    let n = n as f64;
    (n / ((n - 1.0) * g.sqrt())).powf(1.0 / n)
}

/// Equilibrium spend `∫_0^v (n-1) x f(x) F(x)^(n-2) dx` of type `v`.
pub fn equilibrium_spend(model: &dyn ValuationModel, n: u32, v: f64) -> f64 {
    let k = n as i32 - 2;
    let nm1 = (n - 1) as f64;
    adaptive_simpson(|x| nm1 * x * model.pdf(x) * model.cdf(x).powi(k), 0.0, v, QUAD_TOL)
}

/// One grid point of an equilibrium curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub v: f64,
    pub score: f64,
    pub bid: f64,
    pub latency_spend: f64,
    pub total_cost: f64,
}

/// Sampled equilibrium of the ex-post bidding game.
#[derive(Debug, Clone)]
pub struct EquilibriumCurve {
    pub g: f64,
    pub n: u32,
    pub marginal_type: f64,
    pub points: Vec<CurvePoint>,
}

/// Score function of the ex-post equilibrium, evaluable at any valuation.
pub struct ScoreFunction<'a> {
    g: f64,
    n: u32,
    model: &'a dyn ValuationModel,
    marginal: f64,
    bidding: Option<Rk4Solution>,
}

impl<'a> ScoreFunction<'a> {
    /// Solves `(n-1) v f(v) F(v)^(n-2) = C'(s) s'(v)` above the marginal
    /// type with RK4, starting from `s(u) = -sqrt(g)`. Below `u` only latency
    /// is used and `s = -1/spend`.
    pub fn solve(model: &'a dyn ValuationModel, g: f64, n: u32) -> Result<Self, EconError> {
        if n < 2 {
            return Err(EconError::InvalidParameter(format!("need at least 2 players, got {n}")));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(EconError::InvalidParameter(format!("boost g must be > 0, got {g}")));
        }
        let r = g.sqrt();
        let threshold = 1.0 / r;
        let marginal = if equilibrium_spend(model, n, 1.0) <= threshold {
            1.0
        } else {
            bisect_increasing(|v| equilibrium_spend(model, n, v), threshold, 0.0, 1.0)
        };
        let bidding = if marginal < 1.0 {
            let tech = TimeBoostSignal { g };
            let k = n as i32 - 2;
            let nm1 = (n - 1) as f64;
            let rhs = |v: f64, s: f64| nm1 * v * model.pdf(v) * model.cdf(v).powi(k) / tech.marginal(s);
            Some(rk4(rhs, marginal, -r, 1.0, ODE_STEP))
        } else {
            None
        };
        Ok(ScoreFunction { g, n, model, marginal, bidding })
    }

    pub fn marginal_type(&self) -> f64 {
        self.marginal
    }

    /// Equilibrium score of type `v`; `-inf` for the zero type.
    pub fn score(&self, v: f64) -> f64 {
        match &self.bidding {
            Some(sol) if v >= self.marginal => sol.eval(v),
            _ => {
                let spend = equilibrium_spend(self.model, self.n, v);
                if spend <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -1.0 / spend
                }
            }
        }
    }

    pub fn point(&self, v: f64) -> CurvePoint {
        let s = self.score(v);
        if s == f64::NEG_INFINITY {
            return CurvePoint { v, score: s, bid: 0.0, latency_spend: 0.0, total_cost: 0.0 };
        }
        let split = split_unchecked(s, self.g);
        CurvePoint { v, score: s, bid: split.bid, latency_spend: split.latency_spend(), total_cost: split.total() }
    }
}

/// Ex-post equilibrium for uniform valuations on a `grid`-point valuation grid.
pub fn expost_equilibrium(g: f64, n: u32, grid: usize) -> Result<EquilibriumCurve, EconError> {
    expost_equilibrium_with(&Uniform, g, n, grid)
}

pub fn expost_equilibrium_with(
    model: &dyn ValuationModel,
    g: f64,
    n: u32,
    grid: usize,
) -> Result<EquilibriumCurve, EconError> {
    if grid < 2 {
        return Err(EconError::InvalidParameter(format!("grid needs at least 2 points, got {grid}")));
    }
    let sf = ScoreFunction::solve(model, g, n)?;
    let points = (0..grid).map(|i| sf.point(i as f64 / (grid - 1) as f64)).collect();
    Ok(EquilibriumCurve { g, n, marginal_type: sf.marginal_type(), points })
}

/// Split of expected equilibrium spend between bids and latency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiddingShare {
    pub g: f64,
    /// Expected bid `b(g)` per player.
    pub bid_share: f64,
    /// Expected latency spend per player.
    pub latency_share: f64,
    pub marginal_type: f64,
    /// Set when even the top type does not bid.
    pub no_bidding: bool,
}

impl BiddingShare {
    pub fn total(&self) -> f64 {
        self.bid_share + self.latency_share
    }
}

/// `b(g) = ∫_u^1 m(v) f(v) dv` along the equilibrium, uniform valuations.
pub fn bidding_share(g: f64, n: u32) -> Result<BiddingShare, EconError> {
    bidding_share_with(&Uniform, g, n)
}

pub fn bidding_share_with(model: &dyn ValuationModel, g: f64, n: u32) -> Result<BiddingShare, EconError> {
    let sf = ScoreFunction::solve(model, g, n)?;
    let u = sf.marginal_type();
    let below = adaptive_simpson(|v| sf.point(v).latency_spend * model.pdf(v), 0.0, u, QUAD_TOL);
    if u >= 1.0 {
        return Ok(BiddingShare { g, bid_share: 0.0, latency_share: below, marginal_type: u, no_bidding: true });
    }
    let bids = adaptive_simpson(|v| sf.point(v).bid * model.pdf(v), u, 1.0, QUAD_TOL);
    let above = adaptive_simpson(|v| sf.point(v).latency_spend * model.pdf(v), u, 1.0, QUAD_TOL);
    Ok(BiddingShare { g, bid_share: bids, latency_share: below + above, marginal_type: u, no_bidding: false })
}
