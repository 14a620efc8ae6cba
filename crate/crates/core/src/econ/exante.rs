//! Ex-ante latency races: players invest before learning their valuation,
//! and the larger investment wins the expected prize.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::ValuationModel;
use super::EconError;

/// Mixed strategy over spend: point masses plus a uniform density segment.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    atoms: Vec<(f64, f64)>,
    uniform: Option<(f64, f64, f64)>,
}

impl MixedStrategy {
    /// `atoms` are `(spend, mass)`; `uniform` is `(lo, hi, mass)`.
    pub fn new(atoms: Vec<(f64, f64)>, uniform: Option<(f64, f64, f64)>) -> Result<Self, EconError> {
        let mut total = 0.0;
        for &(x, m) in &atoms {
            if !(x >= 0.0 && (0.0..=1.0).contains(&m)) {
                return Err(EconError::InvalidParameter(format!("bad atom ({x}, {m})")));
            }
            total += m;
        }
        if let Some((lo, hi, m)) = uniform {
            if !(lo >= 0.0 && hi > lo && (0.0..=1.0).contains(&m)) {
                return Err(EconError::InvalidParameter(format!("bad uniform segment ({lo}, {hi}, {m})")));
            }
            total += m;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(EconError::InvalidParameter(format!("masses sum to {total}, not 1")));
        }
        Ok(MixedStrategy { atoms, uniform })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn uniform_part(&self) -> Option<(f64, f64, f64)> {
        self.uniform
    }

    /// Mass of the atom at exactly `x`.
    pub fn atom_at(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 == x).map(|a| a.1).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.0 <= x).map(|a| a.1).sum();
        let cont = match self.uniform {
            Some((lo, hi, m)) => m * ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            None => 0.0,
        };
        (atoms + cont).min(1.0)
    }

    pub fn mean(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.0 * a.1).sum();
        atoms + self.uniform.map_or(0.0, |(lo, hi, m)| m * 0.5 * (lo + hi))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut u: f64 = rng.random();
        for &(x, m) in &self.atoms {
            if u < m {
                return x;
            }
            u -= m;
        }
        match self.uniform {
            Some((lo, hi, _)) => rng.random_range(lo..hi),
            None => self.atoms.last().map_or(0.0, |a| a.0),
        }
    }
}

/// Symmetric equilibrium of the unconstrained race: spend uniform on `(0, E[V])`.
pub fn exante_latency_mixed_eq(model: &dyn ValuationModel) -> Result<MixedStrategy, EconError> {
    let ev = model.mean();
    if !(ev.is_finite() && ev > 0.0) {
        return Err(EconError::DegenerateModel(format!("expected valuation is {ev}")));
    }
    MixedStrategy::new(vec![], Some((0.0, ev, 1.0)))
}

/// Equilibrium of the race when the weak player's budget `b1` is below `E[V]`.
#[derive(Debug, Clone)]
pub struct BudgetEquilibrium {
    pub weak: MixedStrategy,
    pub strong: MixedStrategy,
    pub weak_payoff: f64,
    pub strong_payoff: f64,
}

pub fn exante_budget_eq(b1: f64, b2: f64, model: &dyn ValuationModel) -> Result<BudgetEquilibrium, EconError> {
    let ev = model.mean();
    if !(ev.is_finite() && ev > 0.0) {
        return Err(EconError::DegenerateModel(format!("expected valuation is {ev}")));
    }
    if !(b1 > 0.0 && b1 < ev) {
        return Err(EconError::OutOfModel(format!("weak budget must satisfy 0 < B1 < E[V] = {ev}, got {b1}")));
    }
    if b2 <= b1 {
        return Err(EconError::OutOfModel(format!("strong budget {b2} must exceed weak budget {b1}")));
    }
    let weak_atom = (ev - b1) / ev;
    let dens_mass = b1 / ev;
    let weak = MixedStrategy::new(vec![(0.0, weak_atom)], Some((0.0, b1, dens_mass)))?;
    let strong = MixedStrategy::new(vec![(b1, 1.0 - dens_mass)], Some((0.0, b1, dens_mass)))?;
    Ok(BudgetEquilibrium { weak, strong, weak_payoff: 0.0, strong_payoff: ev - b1 })
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    fn from_sums(sum: f64, sum_sq: f64, n: usize) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = (sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
        Estimate { mean, se: (var / nf).sqrt() }
    }
}

fn race_payoff<R: Rng + ?Sized>(x: f64, opp: f64, value: f64, rng: &mut R) -> f64 {
    let win = if x > opp {
        true
    } else if x < opp {
        false
    } else {
        rng.random::<bool>()
    };
    if win {
        value - x
    } else {
        -x
    }
}

/// Payoff of spending exactly `x` against an opponent playing `opponent`,
/// with the prize drawn from `model`.
pub fn deviation_payoff_mc(
    x: f64,
    opponent: &MixedStrategy,
    model: &dyn ValuationModel,
    trials: usize,
    seed: u64,
) -> Estimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..trials {
        let opp = opponent.sample(&mut rng);
        let value = model.sample(&mut rng);
        let p = race_payoff(x, opp, value, &mut rng);
        s += p;
        s2 += p * p;
    }
    Estimate::from_sums(s, s2, trials)
}

/// Payoff of playing `own` against `opponent`.
pub fn mixed_payoff_mc(
    own: &MixedStrategy,
    opponent: &MixedStrategy,
    model: &dyn ValuationModel,
    trials: usize,
    seed: u64,
) -> Estimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..trials {
        let x = own.sample(&mut rng);
        let opp = opponent.sample(&mut rng);
        let value = model.sample(&mut rng);
        let p = race_payoff(x, opp, value, &mut rng);
        s += p;
        s2 += p * p;
    }
    Estimate::from_sums(s, s2, trials)
}

/// Largest gain, in standard errors, of any pure deviation on `deviations`
/// over the equilibrium payoff `eq_payoff`.
pub fn worst_deviation_z(
    deviations: &[f64],
    opponent: &MixedStrategy,
    model: &dyn ValuationModel,
    eq_payoff: f64,
    trials: usize,
    seed: u64,
) -> f64 {
    deviations
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let est = deviation_payoff_mc(x, opponent, model, trials, seed.wrapping_add(i as u64));
            (est.mean - eq_payoff) / est.se.max(1e-12)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::model::{PointMass, Uniform};

    #[test]
    fn unconstrained_race() {
        let s = exante_latency_mixed_eq(&Uniform).unwrap();
        assert_eq!(s.uniform_part(), Some((0.0, 0.5, 1.0)));
        assert_eq!(s.mean(), 0.25);
        assert_eq!(s.cdf(0.25), 0.5);
        assert!(matches!(exante_latency_mixed_eq(&PointMass(0.0)), Err(EconError::DegenerateModel(_))));
    }

    #[test]
    fn unconstrained_deviations_earn_zero() {
        let s = exante_latency_mixed_eq(&Uniform).unwrap();
        for (i, &x) in [0.05, 0.2, 0.35, 0.49].iter().enumerate() {
            let est = deviation_payoff_mc(x, &s, &Uniform, 200_000, 11 + i as u64);
            assert!(est.mean.abs() < 4.0 * est.se, "x={x}: {est:?}");
        }
        // overspending loses
        let est = deviation_payoff_mc(0.7, &s, &Uniform, 50_000, 5);
        assert!(est.mean < -0.15);
    }

    #[test]
    fn budget_equilibrium_shape() {
        let eq = exante_budget_eq(0.2, 1.0, &Uniform).unwrap();
        assert!((eq.weak.atom_at(0.0) - 0.6).abs() < 1e-15);
        assert!((eq.strong_payoff - 0.3).abs() < 1e-15);
        assert_eq!(eq.weak_payoff, 0.0);
        assert!((eq.strong.atom_at(0.2) - 0.6).abs() < 1e-15);
        assert!((eq.weak.cdf(0.1) - (0.6 + 0.2)).abs() < 1e-15);
        assert!((eq.strong.cdf(0.1) - 0.2).abs() < 1e-15);
        assert_eq!(eq.weak.cdf(0.2), 1.0);
        assert!(matches!(exante_budget_eq(0.5, 1.0, &Uniform), Err(EconError::OutOfModel(_))));
        assert!(exante_budget_eq(0.2, 0.1, &Uniform).is_err());
    }

    #[test]
    fn mixed_strategy_validation() {
        assert!(MixedStrategy::new(vec![(0.0, 0.5)], None).is_err());
        assert!(MixedStrategy::new(vec![(0.0, 0.5)], Some((0.0, 1.0, 0.5))).is_ok());
        assert!(MixedStrategy::new(vec![], Some((1.0, 1.0, 1.0))).is_err());
    }
}
