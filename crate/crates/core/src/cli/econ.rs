use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use super::{print_config, with_output, CliError};
use crate::econ::model::{ExpSignal, LinearSignal};
use crate::econ::{
    bidding_share, expost_equilibrium, partial_separation_solve, payoff_equivalence_mc, revenue_equivalence_check,
    SignalTech, TimeBoostSignal, Uniform,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EconTask {
    /// `g,b_g,latency_share` over a log-spaced range of g.
    #[value(name = "bg_sweep")]
    BgSweep,
    /// Ex-post equilibrium curves `v,s,m,latency_spend,total_cost`.
    #[value(name = "curves")]
    Curves,
    /// Early and late bidder curves with an arrival gap.
    #[value(name = "partial_sep")]
    PartialSep,
    /// Expected spend under a chosen signaling technology.
    #[value(name = "rev_equiv")]
    RevEquiv,
    /// All-pay versus winner-pays payoffs by Monte Carlo.
    #[value(name = "payoff_equiv")]
    PayoffEquiv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TechArg {
    /// Bids with maximum boost g.
    Timeboost,
    /// Cost `s + shift`.
    Linear,
    /// Cost `exp(s)`.
    Exp,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EconArgs {
    #[arg(value_enum)]
    pub task: EconTask,
    /// Maximum time boost.
    #[arg(long, default_value_t = 10.0)]
    pub g: f64,
    /// Number of players; comma-separated list for rev_equiv and payoff_equiv.
    #[arg(long = "n", value_delimiter = ',', default_value = "2")]
    pub n: Vec<u32>,
    /// Arrival gap between the two bidders (partial_sep).
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Valuation grid size.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Sweep start (bg_sweep).
    #[arg(long, default_value_t = 1e3)]
    pub g_min: f64,
    /// Sweep end (bg_sweep).
    #[arg(long, default_value_t = 1e6)]
    pub g_max: f64,
    /// Sweep points per factor of ten (bg_sweep).
    #[arg(long, default_value_t = 1)]
    pub per_decade: usize,
    #[arg(long, value_enum, default_value_t = TechArg::Timeboost)]
    pub tech: TechArg,
    /// Additive constant of the linear technology.
    #[arg(long, default_value_t = 2.0)]
    pub shift: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepRow {
    g: f64,
    b_g: f64,
    latency_share: f64,
}

#[derive(Serialize)]
struct CurveRow {
    v: f64,
    s: f64,
    m: f64,
    latency_spend: f64,
    total_cost: f64,
}

#[derive(Serialize)]
struct PartialRow {
    v: f64,
    bid_early: f64,
    bid_late: f64,
    signal_early: f64,
    signal_late: f64,
}

#[derive(Serialize)]
struct RevenueRow {
    n: u32,
    max_deviation: f64,
    expected_spend: f64,
    total_spend: f64,
}

#[derive(Serialize)]
struct PayoffRow {
    n: u32,
    trials: usize,
    all_pay: f64,
    all_pay_se: f64,
    first_price: f64,
    first_price_se: f64,
    difference: f64,
    diff_se: f64,
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn to_csv<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows of plain numbers serialize");
    }
    w.into_inner().expect("writing to memory cannot fail")
}

fn non_decreasing(xs: impl IntoIterator<Item = f64>) -> bool {
    let xs: Vec<f64> = xs.into_iter().collect();
    xs.windows(2).all(|w| w[1] >= w[0] - 1e-12)
}

/// Log-spaced points from `lo` to `hi` inclusive.
fn sweep_points(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
        return Err(CliError::Usage(format!("sweep needs 0 < g_min <= g_max, got {lo}..{hi}")));
    }
    if per_decade == 0 {
        return Err(CliError::Usage("per_decade must be at least 1".into()));
    }
    let decades = (hi / lo).log10();
    let steps = (decades * per_decade as f64).round() as usize;
    Ok((0..=steps).map(|i| if steps == 0 { lo } else { lo * 10f64.powf(decades * i as f64 / steps as f64) }).collect())
}

fn single_n(a: &EconArgs) -> Result<u32, CliError> {
    match a.n.as_slice() {
        [n] => Ok(*n),
        _ => Err(CliError::Usage(format!("{:?} takes a single --n", a.task))),
    }
}

pub(super) fn cmd_econ(a: &EconArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    print_config(stderr, "econ", a);
    let (csv, check) = match a.task {
        EconTask::BgSweep => {
            let n = single_n(a)?;
            let rows = sweep_points(a.g_min, a.g_max, a.per_decade)?
                .into_iter()
                .map(|g| bidding_share(g, n).map(|s| SweepRow { g, b_g: s.bid_share, latency_share: s.latency_share }))
                .collect::<Result<Vec<_>, _>>()
                .map_err(usage)?;
            let ok = non_decreasing(rows.iter().map(|r| r.b_g));
            (to_csv(&rows), ok.then_some(()).ok_or("b(g) is not non-decreasing in g"))
        }
        EconTask::Curves => {
            let curve = expost_equilibrium(a.g, single_n(a)?, a.grid).map_err(usage)?;
            let rows: Vec<CurveRow> = curve
                .points
                .iter()
                .map(|p| CurveRow {
                    v: p.v,
                    s: p.score,
                    m: p.bid,
                    latency_spend: p.latency_spend,
                    total_cost: p.total_cost,
                })
                .collect();
            let ok = non_decreasing(rows.iter().map(|r| r.s)) && non_decreasing(rows.iter().map(|r| r.m));
            (to_csv(&rows), ok.then_some(()).ok_or("equilibrium score or bid decreases in v"))
        }
        EconTask::PartialSep => {
            let (_, points) = partial_separation_solve(a.g, a.delta, a.grid).map_err(usage)?;
            let rows: Vec<PartialRow> = points
                .iter()
                .map(|p| PartialRow {
                    v: p.v,
                    bid_early: p.bid_early,
                    bid_late: p.bid_late,
                    signal_early: p.signal_early,
                    signal_late: p.signal_late,
                })
                .collect();
            let ok =
                non_decreasing(rows.iter().map(|r| r.bid_early)) && non_decreasing(rows.iter().map(|r| r.bid_late));
            (to_csv(&rows), ok.then_some(()).ok_or("signaling curves are not non-decreasing"))
        }
        EconTask::RevEquiv => {
            let tech: Box<dyn SignalTech> = match a.tech {
                TechArg::Timeboost => Box::new(TimeBoostSignal { g: a.g }),
                TechArg::Linear => Box::new(LinearSignal { shift: a.shift }),
                TechArg::Exp => Box::new(ExpSignal),
            };
            let rows =
                a.n.iter()
                    .map(|&n| {
                        revenue_equivalence_check(tech.as_ref(), &Uniform, n, a.grid).map(|r| RevenueRow {
                            n,
                            max_deviation: r.max_deviation,
                            expected_spend: r.expected_spend,
                            total_spend: r.total_spend,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(usage)?;
            (to_csv(&rows), Ok(()))
        }
        EconTask::PayoffEquiv => {
            let rows =
                a.n.iter()
                    .map(|&n| {
                        payoff_equivalence_mc(&Uniform, n, a.trials, a.seed).map(|r| PayoffRow {
                            n,
                            trials: r.trials,
                            all_pay: r.all_pay,
                            all_pay_se: r.all_pay_se,
                            first_price: r.first_price,
                            first_price_se: r.first_price_se,
                            difference: r.difference(),
                            diff_se: r.diff_se,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(usage)?;
            (to_csv(&rows), Ok(()))
        }
    };
    with_output(a.out.as_deref(), stdout, |w: &mut dyn Write| -> io::Result<()> { w.write_all(&csv) })?;
    check.map_err(|m| CliError::Invariant(m.to_string()))
}
