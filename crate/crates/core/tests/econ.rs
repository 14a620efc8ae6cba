use timeboost::econ::exante::worst_deviation_z;
use timeboost::econ::model::PowerLaw;
use timeboost::econ::{
    bidding_share, exante_budget_eq, exante_latency_mixed_eq, expost_equilibrium, expost_optimal_split,
    full_separation_bid, partial_separation_solve, signal_cost, EconError, Uniform,
};

#[test]
fn signal_cost_matches_grid_search() {
    for g in [0.5f64, 10.0, 1e3] {
        for s in [-50.0, -3.0, -0.5, 0.0, 0.2 * g, 0.9 * g] {
            // cheapest bid m and latency x with pi(m) - 1/x = s
            let mut best = f64::INFINITY;
            for i in 0..=400_000 {
                // m = 0, then log-spaced over 1e-6..1e6
                let m = if i == 0 { 0.0 } else { 10f64.powf(-6.0 + 12.0 * i as f64 / 400_000.0) };
                let gap = g * m / (m + 1.0) - s;
                if gap > 0.0 {
                    best = best.min(m + 1.0 / gap);
                }
            }
            let c = signal_cost(s, g).unwrap();
            assert!(c <= best + 1e-9 && best - c < 1e-3 * best.max(1.0), "g={g} s={s}: {c} vs {best}");
        }
    }
    assert!(matches!(signal_cost(1.0, 1.0), Err(EconError::InfeasibleScore { .. })));
}

#[test]
fn split_hits_the_score() {
    for (s, g) in [(-2.0, 4.0), (0.3, 1.0), (5.0, 100.0)] {
        let sp = expost_optimal_split(s, g).unwrap();
        let pi = g * sp.bid / (sp.bid + 1.0);
        assert!((pi - 1.0 / sp.latency_spend() - s).abs() < 1e-9);
    }
}

#[test]
fn two_player_curve_is_monotone_with_known_cost() {
    let c = expost_equilibrium(50.0, 2, 201).unwrap();
    for w in c.points.windows(2) {
        assert!(w[1].score >= w[0].score && w[1].bid >= w[0].bid);
    }
    for p in &c.points {
        assert!((p.total_cost - p.v * p.v / 2.0).abs() < 1e-9);
    }
}

#[test]
fn spend_split_sums_to_a_sixth() {
    for g in [10.0, 1e3, 1e5] {
        let s = bidding_share(g, 2).unwrap();
        assert!((s.total() - 1.0 / 6.0).abs() < 1e-8, "g={g}: {}", s.total());
    }
}

#[test]
fn partial_separation_tends_to_symmetric() {
    let (_, pts) = partial_separation_solve(10.0, 1e-4, 51).unwrap();
    for p in &pts {
        assert!((p.bid_early - full_separation_bid(p.v, 10.0)).abs() < 1e-2);
    }
    assert!(partial_separation_solve(1.0, 2.0, 10).is_err());
}

#[test]
fn mixed_races_resist_deviation() {
    let eq = exante_latency_mixed_eq(&Uniform).unwrap();
    let z = worst_deviation_z(&[0.0, 0.1, 0.25, 0.4, 0.5], &eq, &Uniform, 0.0, 100_000, 3);
    assert!(z < 3.0, "z = {z}");
    let model = PowerLaw::new(2.0).unwrap();
    let budget = exante_budget_eq(0.3, 1.0, &model).unwrap();
    assert!((budget.strong_payoff - (2.0 / 3.0 - 0.3)).abs() < 1e-12);
}
