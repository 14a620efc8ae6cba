//! Subcommands of the `timeboost` binary.
//!
//! Every subcommand prints its resolved configuration as one JSON line on
//! stderr before doing any work. Exit codes: 0 success, 1 a run invariant
//! was violated, 2 bad usage or input.

mod econ;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::econ::{block_auction_compare, BidDistribution};
use crate::score::{read_transactions, write_feed, ScoreParams};
use crate::sim::{run_scenario, SimConfig};

pub use econ::{EconArgs, EconTask, TechArg};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "timeboost",
    version,
    about = "Time-boost sequencing: ordering, committee simulation, equilibrium tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Order a JSON-lines transaction file into a feed.
    Sequence(SequenceArgs),
    /// Run a committee scenario.
    Sim(SimArgs),
    /// Emit equilibrium tables as CSV.
    Econ(EconArgs),
    /// Compare block-to-block batching against continuous boosting.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScoreArgs {
    /// Maximum time boost in seconds.
    #[arg(long, default_value_t = 0.5)]
    pub g: f64,
    /// Bid at which half the maximum boost is reached.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
}

impl ScoreArgs {
    fn params(&self) -> Result<ScoreParams, CliError> {
        ScoreParams::new(self.g, self.c).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SequenceArgs {
    /// Input transactions, one JSON object per line (`-` for stdin).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Output feed; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub score: ScoreArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimArgs {
    /// Scenario file.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for metrics.json and events.jsonl; metrics go to stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Also write per-transaction rows to txs.csv in the output directory.
    #[arg(long, requires = "out")]
    pub csv: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Committee size override.
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// Fault bound override.
    #[arg(long = "f")]
    pub f: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BidsArg {
    Zero,
    Uniform,
    Exponential,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub score: ScoreArgs,
    /// Latency of the faster party in seconds.
    #[arg(long, default_value_t = 0.1)]
    pub s1: f64,
    /// Latency of the slower party in seconds.
    #[arg(long, default_value_t = 0.2)]
    pub s2: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Bid distribution used for the continuous delay.
    #[arg(long, value_enum, default_value_t = BidsArg::Zero)]
    pub bids: BidsArg,
    /// Upper bound (uniform) or mean (exponential) of the bids.
    #[arg(long, default_value_t = 1.0)]
    pub bid_scale: f64,
    /// Write the report as JSON here as well.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Sequence(a) => cmd_sequence(a, stdout, stderr),
        Command::Sim(a) => cmd_sim(a, stdout, stderr),
        Command::Econ(a) => econ::cmd_econ(a, stdout, stderr),
        Command::Bench(a) => cmd_bench(a, stdout, stderr),
    }
}

fn print_config<T: Serialize>(stderr: &mut dyn Write, command: &str, cfg: &T) {
    let json = serde_json::json!({ "command": command, "config": cfg });
    let _ = writeln!(stderr, "{json}");
}

/// Runs `f` against the file at `path`, or stdout when `path` is `None`.
fn with_output<F>(path: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(p, e))
        }
        None => f(stdout).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

pub fn cmd_sequence(a: &SequenceArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    print_config(stderr, "sequence", a);
    let params = a.score.params()?;
    let txs = if a.input.as_os_str() == "-" {
        read_transactions(io::stdin().lock())
    } else {
        let file = File::open(&a.input).map_err(|e| CliError::io(&a.input, e))?;
        read_transactions(BufReader::new(file))
    }
    .map_err(|e| CliError::Usage(format!("{}: {e}", a.input.display())))?;
    with_output(a.out.as_deref(), stdout, |w| write_feed(w, &txs, &params).map_err(|e| io::Error::other(e.to_string())))
}

pub fn cmd_sim(a: &SimArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = SimConfig::load(&a.config).map_err(|e| CliError::Usage(format!("{}: {e}", a.config.display())))?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(g) = a.g {
        cfg.params.g = g;
    }
    if let Some(c) = a.c {
        cfg.params.c = c;
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(f) = a.f {
        cfg.f = f;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    print_config(stderr, "sim", &cfg);

    let outcome = run_scenario(&cfg);
    let metrics = serde_json::to_string_pretty(&outcome.metrics).expect("metrics serialize");
    match &a.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            let write = |name: &str, body: &[u8]| {
                let p = dir.join(name);
                std::fs::write(&p, body).map_err(|e| CliError::io(&p, e))
            };
            write("metrics.json", format!("{metrics}\n").as_bytes())?;
            write("events.jsonl", outcome.log_jsonl().as_bytes())?;
            if a.csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in &outcome.txs {
                    w.serialize(row).map_err(|e| CliError::io(&dir.join("txs.csv"), e.into()))?;
                }
                let body = w.into_inner().map_err(|e| CliError::io(&dir.join("txs.csv"), e.into_error()))?;
                write("txs.csv", &body)?;
            }
        }
        None => {
            writeln!(stdout, "{metrics}").map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
    }
    if outcome.metrics.ok() {
        Ok(())
    } else {
        Err(CliError::Invariant(outcome.metrics.violations.join("; ")))
    }
}

pub fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    print_config(stderr, "bench", a);
    let params = a.score.params()?;
    let bids = match a.bids {
        BidsArg::Zero => BidDistribution::Zero,
        BidsArg::Uniform => BidDistribution::Uniform { max: a.bid_scale },
        BidsArg::Exponential => BidDistribution::Exponential { mean: a.bid_scale },
    };
    if a.bids != BidsArg::Zero && !(a.bid_scale.is_finite() && a.bid_scale > 0.0) {
        return Err(CliError::Usage(format!("--bid-scale must be > 0, got {}", a.bid_scale)));
    }
    let r = block_auction_compare(&params, a.s1, a.s2, bids, a.trials, a.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let table = [
        ("window_fraction", r.window_fraction),
        ("ethereum_window_fraction", r.ethereum_window_fraction),
        ("ethereum_factor", r.ethereum_factor),
        ("batch_avg_delay", r.batch_avg_delay),
        ("batch_delay_se", r.batch_delay_se),
        ("continuous_avg_delay", r.continuous_avg_delay),
    ];
    let io_err = |e| CliError::io(Path::new("<stdout>"), e);
    writeln!(stdout, "{:<26} {:>14}", "metric", "value").map_err(io_err)?;
    for (k, v) in table {
        writeln!(stdout, "{k:<26} {v:>14.6}").map_err(io_err)?;
    }
    if let Some(p) = &a.out {
        let json = serde_json::to_string_pretty(&r).expect("report serializes");
        std::fs::write(p, format!("{json}\n")).map_err(|e| CliError::io(p, e))?;
    }
    Ok(())
}
