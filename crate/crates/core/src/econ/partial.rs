//! Bidding after unequal ex-ante latency investment.
//!
//! Bidder 1 arrives `delta` earlier than bidder 2. Both stay out below the
//! threshold `sqrt(delta/(g - delta))`; above it each bidder's valuation as
//! a function of its bid is
//!
//! ```text
//! v1(p) = th * exp( ∫_0^p       g/(g-x-Δ)^2 / D(x) dx )
//! v2(p) = th * exp( ∫_0^(p-Δ)   g/(g-x)^2   / D(x) dx )
//! D(x)  = x/(g-x) + (x+Δ)/(g-x-Δ)
//! ```
//!
//! The bid functions are the inverses, found by safeguarded Newton steps on
//! `ln v`, whose derivative is the integrand itself.

use super::numeric::adaptive_simpson;
use super::EconError;

const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy)]
pub struct PartialSeparation {
    g: f64,
    delta: f64,
    threshold: f64,
}

/// One row of the signaling curves. Signals are `bid - arrival` with the
/// late bidder's arrival normalized to 0, so the early bidder's signal is
/// `bid1 + delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalPoint {
    pub v: f64,
    pub bid_early: f64,
    pub bid_late: f64,
    pub signal_early: f64,
    pub signal_late: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Early,
    Late,
}

impl PartialSeparation {
    pub fn new(g: f64, delta: f64) -> Result<Self, EconError> {
        if !(g.is_finite() && g > 0.0) {
            return Err(EconError::InvalidParameter(format!("boost g must be > 0, got {g}")));
        }
        if !(delta > 0.0 && delta < g) {
            return Err(EconError::OutOfDomain(format!(
                "latency gap must satisfy 0 < delta < g, got delta={delta}, g={g}"
            )));
        }
        Ok(PartialSeparation { g, delta, threshold: (delta / (g - delta)).sqrt() })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Lowest valuation that bids.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    fn denom(&self, x: f64) -> f64 {
        let (g, d) = (self.g, self.delta);
        x / (g - x) + (x + d) / (g - x - d)
    }

    /// d ln v1 / dp at bid p.
    pub fn early_rate(&self, p: f64) -> f64 {
        let (g, d) = (self.g, self.delta);
        g / (g - p - d).powi(2) / self.denom(p)
    }

    /// d ln v2 / dp at bid `p + delta`.
    pub fn late_rate(&self, x: f64) -> f64 {
        let g = self.g;
        g / (g - x).powi(2) / self.denom(x)
    }

    /// Valuation of the early bidder who bids `p`.
    pub fn early_valuation(&self, p: f64) -> f64 {
        self.threshold * adaptive_simpson(|x| self.early_rate(x), 0.0, p, QUAD_TOL).exp()
    }

    /// Valuation of the late bidder who bids `p >= delta`.
    pub fn late_valuation(&self, p: f64) -> f64 {
        self.threshold * adaptive_simpson(|x| self.late_rate(x), 0.0, p - self.delta, QUAD_TOL).exp()
    }

    /// Largest bid offset each side may reach.
    fn cap(&self) -> f64 {
        self.g - self.delta
    }

    fn rate(&self, side: Side, x: f64) -> f64 {
        match side {
            Side::Early => self.early_rate(x),
            Side::Late => self.late_rate(x),
        }
    }

    /// Solves `ln th + ∫_0^x rate = ln v` for offsets `x`, one per valuation.
    /// `vs` must be sorted ascending and at least the threshold.
    fn solve_offsets(&self, side: Side, vs: &[f64]) -> Result<Vec<f64>, EconError> {
        let mut out = Vec::with_capacity(vs.len());
        // anchor: offset with known integral value
        let (mut x0, mut i0) = (0.0f64, 0.0f64);
        let ln_th = self.threshold.ln();
        for &v in vs {
            if v < self.threshold {
                return Err(EconError::OutOfDomain(format!("valuation {v} is below the bidding threshold")));
            }
            let target = v.ln() - ln_th;
            let integral = |x: f64| i0 + adaptive_simpson(|y| self.rate(side, y), x0, x, QUAD_TOL);
            let (mut lo, mut hi) = (x0, self.cap());
            let mut x = x0;
            let mut fx = integral(x) - target;
            let mut converged = fx.abs() < 1e-15;
            for _ in 0..200 {
                if converged {
                    break;
                }
                if fx < 0.0 {
                    lo = x;
                } else {
                    hi = x;
                }
                let newton = x - fx / self.rate(side, x);
                x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
                fx = integral(x) - target;
                converged = fx.abs() < 1e-13 || (hi - lo) < 1e-15 * hi.max(1.0);
            }
            if !converged || !fx.is_finite() {
                return Err(EconError::SolverFailure(format!("no {side:?} bid reaches valuation {v}")));
            }
            if side == Side::Late && self.cap() - x < 1e-9 {
                return Err(EconError::SolverFailure(format!("late bidder cannot reach valuation {v} below g")));
            }
            i0 = target;
            x0 = x;
            out.push(x);
        }
        Ok(out)
    }

    /// Early bidder's bid at valuation `v` (zero below the threshold).
    pub fn early_bid(&self, v: f64) -> Result<f64, EconError> {
        if v <= self.threshold {
            return Ok(0.0);
        }
        Ok(self.solve_offsets(Side::Early, &[v])?[0])
    }

    /// Late bidder's bid at valuation `v` (zero below the threshold).
    pub fn late_bid(&self, v: f64) -> Result<f64, EconError> {
        if v <= self.threshold {
            return Ok(0.0);
        }
        Ok(self.solve_offsets(Side::Late, &[v])?[0] + self.delta)
    }

    /// Both signaling curves on `grid` valuations evenly spaced from the
    /// threshold to 1.
    pub fn curves(&self, grid: usize) -> Result<Vec<SignalPoint>, EconError> {
        if grid < 2 {
            return Err(EconError::InvalidParameter(format!("grid needs at least 2 points, got {grid}")));
        }
        if self.threshold >= 1.0 {
            return Err(EconError::OutOfDomain(format!(
                "bidding threshold {} is not below 1: nobody bids",
                self.threshold
            )));
        }
        let vs: Vec<f64> =
            (0..grid).map(|i| self.threshold + (1.0 - self.threshold) * i as f64 / (grid - 1) as f64).collect();
        let early = self.solve_offsets(Side::Early, &vs)?;
        let late = self.solve_offsets(Side::Late, &vs)?;
        Ok(vs
            .iter()
            .zip(early.iter().zip(&late))
            .map(|(&v, (&e, &l))| SignalPoint {
                v,
                bid_early: e,
                bid_late: l + self.delta,
                signal_early: e + self.delta,
                signal_late: l + self.delta,
            })
            .collect())
    }
}

/// Symmetric bid `g v^2 / (2 + v^2)` when both bidders have equal latency.
pub fn full_separation_bid(v: f64, g: f64) -> f64 {
    g * v * v / (2.0 + v * v)
}

/// Inverse of [`full_separation_bid`]: `sqrt(2p / (g - p))`.
pub fn full_separation_valuation(p: f64, g: f64) -> f64 {
    (2.0 * p / (g - p)).sqrt()
}

/// Partially separating equilibrium for `(g, delta)` on a valuation grid.
pub fn partial_separation_solve(
    g: f64,
    delta: f64,
    grid: usize,
) -> Result<(PartialSeparation, Vec<SignalPoint>), EconError> {
    let eq = PartialSeparation::new(g, delta)?;
    let pts = eq.curves(grid)?;
    Ok((eq, pts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_separation_examples() {
        assert_eq!(full_separation_bid(0.0, 10.0), 0.0);
        assert!((full_separation_bid(1.0, 10.0) - 10.0 / 3.0).abs() < 1e-15);
        for i in 0..=100 {
            let v = i as f64 / 100.0;
            let back = full_separation_valuation(full_separation_bid(v, 7.0), 7.0);
            assert!((back - v).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_and_domain() {
        let eq = PartialSeparation::new(10.0, 0.1).unwrap();
        assert!((eq.threshold() - 0.100504).abs() < 1e-6);
        assert!(matches!(PartialSeparation::new(1.0, 1.0), Err(EconError::OutOfDomain(_))));
        assert!(PartialSeparation::new(1.0, 2.0).is_err());
        assert!(PartialSeparation::new(1.0, 0.0).is_err());
    }

    #[test]
    fn boundary_values() {
        let eq = PartialSeparation::new(10.0, 0.1).unwrap();
        assert_eq!(eq.early_valuation(0.0), eq.threshold());
        assert_eq!(eq.late_valuation(0.1), eq.threshold());
        let prod = eq.early_valuation(0.0) * eq.late_valuation(0.1);
        assert!((prod - 0.1 / 9.9).abs() < 1e-15);
    }

    #[test]
    fn bids_invert_valuations() {
        let eq = PartialSeparation::new(10.0, 0.1).unwrap();
        for &v in &[0.2, 0.5, 0.9, 1.0] {
            let p1 = eq.early_bid(v).unwrap();
            let p2 = eq.late_bid(v).unwrap();
            assert!((eq.early_valuation(p1) - v).abs() < 1e-11);
            assert!((eq.late_valuation(p2) - v).abs() < 1e-11);
        }
        assert_eq!(eq.early_bid(0.05).unwrap(), 0.0);
    }

    #[test]
    fn late_bidder_signals_higher() {
        let (_, pts) = partial_separation_solve(10.0, 0.1, 200).unwrap();
        for p in &pts {
            assert!(p.bid_early <= p.bid_late - 0.1 + 1e-12);
            assert!(p.signal_early <= p.signal_late + 1e-12);
        }
        assert!(pts.windows(2).all(|w| w[1].bid_early > w[0].bid_early && w[1].bid_late > w[0].bid_late));
    }

    #[test]
    fn no_bidders_when_threshold_too_high() {
        let eq = PartialSeparation::new(1.0, 0.6).unwrap();
        assert!(eq.threshold() > 1.0);
        assert!(eq.curves(10).is_err());
    }
}
