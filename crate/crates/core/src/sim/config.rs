//! Scenario description, loaded from JSON.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::committee::{Behavior, CommitteeError, CommitteeParams, SequencerId};
use crate::econ::BidDistribution;
use crate::score::ScoreParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario is not valid JSON for the schema: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Committee(#[from] CommitteeError),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Closed interval of seconds, sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn validate(&self, what: &str) -> Result<(), ConfigError> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min >= 0.0 && self.max >= self.min) {
            return Err(invalid(format!("{what} must satisfy 0 <= min <= max, got [{}, {}]", self.min, self.max)));
        }
        Ok(())
    }
}

fn default_broadcast() -> Range {
    Range { min: 0.005, max: 0.05 }
}

fn default_user_latency() -> Range {
    Range { min: 0.001, max: 0.02 }
}

fn default_tick() -> f64 {
    0.05
}

fn default_l1_lag() -> f64 {
    1.0
}

fn default_force_age() -> f64 {
    10.0
}

fn default_horizon() -> f64 {
    600.0
}

fn default_fetch_delay() -> f64 {
    0.05
}

fn default_users() -> usize {
    1
}

/// Timed scenario step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    /// A user sends a transaction to every sequencer.
    Submit {
        #[serde(default)]
        user: usize,
        #[serde(default)]
        bid: f64,
        /// Fee declared outside the ciphertext; defaults to `bid`.
        #[serde(default)]
        declared: Option<f64>,
        #[serde(default)]
        body: String,
        /// Encrypt bytes that do not parse as a transaction.
        #[serde(default)]
        malformed: bool,
    },
    /// A message enters the L1 delayed inbox. Unless withheld, sequencers
    /// pick it up after the L1 lag.
    Delayed {
        body: String,
        #[serde(default)]
        withhold: bool,
    },
    /// Someone forces the given delayed message through L1.
    ForceInclude { index: u64 },
    /// The replica stops receiving messages until resumed.
    Pause { replica: SequencerId },
    /// The replica receives its whole backlog at once.
    Resume { replica: SequencerId },
    /// The replica restarts from nothing (`cold`) or drops its state, and
    /// recovers through the committee.
    Recover {
        replica: SequencerId,
        #[serde(default)]
        cold: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptStep {
    /// Simulation time in seconds.
    pub at: f64,
    #[serde(flatten)]
    pub action: Action,
}

/// Generated stream of user transactions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub count: usize,
    #[serde(default)]
    pub start: f64,
    /// Mean spacing between submissions.
    pub spacing: f64,
    /// Each submission is delayed by up to this much, uniformly.
    #[serde(default)]
    pub jitter: f64,
    #[serde(default = "zero_bids")]
    pub bids: BidDistribution,
}

fn zero_bids() -> BidDistribution {
    BidDistribution::Zero
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub name: String,
    pub n: usize,
    pub f: usize,
    #[serde(default)]
    pub params: ScoreParams,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub batch_window: Option<f64>,
    #[serde(default)]
    pub max_batch_bytes: Option<usize>,
    #[serde(default = "default_broadcast")]
    pub broadcast_delay: Range,
    /// Random user-to-sequencer latency, used when no matrix is given.
    #[serde(default = "default_user_latency")]
    pub user_latency: Range,
    /// Explicit latency in seconds, `latency_matrix[user][sequencer]`.
    #[serde(default)]
    pub latency_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_users")]
    pub users: usize,
    /// Each replica's clock is off by a fixed amount within `±clock_skew`.
    #[serde(default)]
    pub clock_skew: f64,
    /// Period of replica clock ticks.
    #[serde(default = "default_tick")]
    pub tick: f64,
    #[serde(default = "default_l1_lag")]
    pub l1_lag: f64,
    #[serde(default = "default_force_age")]
    pub force_age: f64,
    #[serde(default = "default_fetch_delay")]
    pub fetch_delay: f64,
    /// The run stops here even if work is outstanding.
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub adversaries: BTreeMap<SequencerId, Behavior>,
    /// Peers that hand out a bogus snapshot to recovering replicas.
    #[serde(default)]
    pub corrupt_snapshots: Vec<SequencerId>,
    #[serde(default)]
    pub workload: Option<Workload>,
    #[serde(default)]
    pub script: Vec<ScriptStep>,
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn committee(&self) -> CommitteeParams {
        let mut p = CommitteeParams::new(self.n, self.f, self.params);
        if let Some(w) = self.batch_window {
            p.batch_window = w;
        }
        if let Some(b) = self.max_batch_bytes {
            p.max_batch_bytes = b;
        }
        p
    }

    pub fn behavior(&self, id: SequencerId) -> Behavior {
        self.adversaries.get(&id).copied().unwrap_or_default()
    }

    /// Lowest-id honest replica that the script never disturbs.
    pub fn observer(&self) -> Option<SequencerId> {
        let touched: Vec<SequencerId> = self
            .script
            .iter()
            .filter_map(|s| match s.action {
                Action::Pause { replica } | Action::Resume { replica } | Action::Recover { replica, .. } => {
                    Some(replica)
                }
                _ => None,
            })
            .collect();
        (0..self.n as SequencerId).find(|i| self.behavior(*i).is_honest() && !touched.contains(i))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.committee().validate()?;
        let n = self.n as SequencerId;
        if self.adversaries.keys().any(|&i| i >= n) || self.corrupt_snapshots.iter().any(|&i| i >= n) {
            return Err(invalid("adversary ids must be below N"));
        }
        let faulty = self.adversaries.values().filter(|b| !b.is_honest()).count();
        if faulty > self.f {
            return Err(invalid(format!("{faulty} non-honest replicas exceed the fault bound F={}", self.f)));
        }
        self.broadcast_delay.validate("broadcast_delay")?;
        self.user_latency.validate("user_latency")?;
        if self.users == 0 {
            return Err(invalid("need at least one user"));
        }
        if let Some(m) = &self.latency_matrix {
            if m.len() != self.users || m.iter().any(|row| row.len() != self.n) {
                return Err(invalid(format!("latency_matrix must be {} x {}", self.users, self.n)));
            }
            if m.iter().flatten().any(|d| !(d.is_finite() && *d >= 0.0)) {
                return Err(invalid("latencies must be finite and >= 0"));
            }
        }
        for (name, v) in [
            ("clock_skew", self.clock_skew),
            ("l1_lag", self.l1_lag),
            ("force_age", self.force_age),
            ("fetch_delay", self.fetch_delay),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.tick.is_finite() && self.tick > 0.0) {
            return Err(invalid(format!("tick must be > 0, got {}", self.tick)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(invalid(format!("horizon must be > 0, got {}", self.horizon)));
        }
        if let Some(w) = &self.workload {
            if !(w.spacing.is_finite() && w.spacing >= 0.0 && w.start >= 0.0 && w.jitter >= 0.0) {
                return Err(invalid("workload start, spacing and jitter must be >= 0"));
            }
        }
        for step in &self.script {
            if !(step.at.is_finite() && step.at >= 0.0) {
                return Err(invalid(format!("script time must be >= 0, got {}", step.at)));
            }
            match &step.action {
                Action::Submit { user, bid, declared, .. } => {
                    if *user >= self.users {
                        return Err(invalid(format!("user {user} out of range")));
                    }
                    if !(bid.is_finite() && *bid >= 0.0) || declared.is_some_and(|d| !(d.is_finite() && d >= 0.0)) {
                        return Err(invalid("bids and declared fees must be finite and >= 0"));
                    }
                }
                Action::Pause { replica } | Action::Resume { replica } | Action::Recover { replica, .. } => {
                    if *replica >= n {
                        return Err(invalid(format!("replica {replica} out of range")));
                    }
                }
                Action::Delayed { .. } | Action::ForceInclude { .. } => {}
            }
        }
        if self.observer().is_none() {
            return Err(invalid("need an honest replica the script leaves alone"));
        }
        Ok(())
    }
}
