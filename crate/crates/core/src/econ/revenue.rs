//! Revenue equivalence across signaling technologies.

use super::expost::equilibrium_spend;
use super::model::{SignalTech, ValuationModel};
use super::numeric::adaptive_simpson;
use super::EconError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevenueReport {
    pub n: u32,
    /// Max |C(s(v)) - spend(v)| over the grid.
    pub max_deviation: f64,
    /// Expected spend of one player.
    pub expected_spend: f64,
    /// Expected spend of all `n` players together.
    pub total_spend: f64,
}

/// Solves the equilibrium `C(s(v)) = ∫_0^v (n-1) x f F^(n-2)` of `tech` by
/// inverting its cost, and reports how well the spend identity holds plus
/// the expected spend.
pub fn revenue_equivalence_check(
    tech: &dyn SignalTech,
    model: &dyn ValuationModel,
    n: u32,
    grid: usize,
) -> Result<RevenueReport, EconError> {
    if n < 2 {
        return Err(EconError::InvalidParameter(format!("need at least 2 players, got {n}")));
    }
    if grid < 2 {
        return Err(EconError::InvalidParameter(format!("grid needs at least 2 points, got {grid}")));
    }
    let realized = |v: f64| -> Result<(f64, f64), EconError> {
        let target = equilibrium_spend(model, n, v);
        if target <= 0.0 {
            return Ok((0.0, 0.0));
        }
        let s = tech.inverse(target)?;
        Ok((tech.cost(s), target))
    };
    let mut max_dev: f64 = 0.0;
    for i in 1..grid {
        let v = i as f64 / (grid - 1) as f64;
        let (c, target) = realized(v)?;
        max_dev = max_dev.max((c - target).abs());
    }
    // Inversion already succeeded on the grid; integrate the realized cost.
    let failure = std::cell::RefCell::new(None);
    let expected = adaptive_simpson(
        |v| match realized(v) {
            Ok((c, _)) => c * model.pdf(v),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        1.0,
        1e-12,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(RevenueReport { n, max_deviation: max_dev, expected_spend: expected, total_spend: n as f64 * expected })
}
