//! Monte Carlo experiment harness: declarative sweeps over game dimensions,
//! pseudo-regret estimation, scaling fits, and plot-ready exports.
//!
//! A sweep is a JSON document ([`ExperimentSpec`]) naming a grid of
//! `(K, N, T, ε)` cells, a strategy set, and learner configurations. Every
//! cell runs `trials` independent trials; results land in two CSV files
//! (per-cell summary, per-trial detail) whose bytes depend only on
//! `(seed, spec)` — never on thread count or scheduling.

pub mod plotdata;
pub mod regret;
pub mod scaling;
pub mod sweep;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::ProtocolError;
use crate::config::{ArmId, ConfigError, GameConfig, StrategyId};
use crate::learners::{Exp4, FixedArm, Learner, OracleLearner, ProperDelay, UniformRandom};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("auto-ε requires n > 10, got n={batch_size}")]
    AutoEpsilonSmallBatch { batch_size: u32 },
    #[error("unknown learner kind {0:?} (expected exp4, uniform, oracle, or fixed)")]
    UnknownLearner(String),
    #[error("rate field {field} must be \"auto\" or a number, got {value:?}")]
    BadRate { field: &'static str, value: String },
    #[error("scaling fit needs at least {need} usable points, got {got}")]
    NotEnoughPoints { need: usize, got: usize },
    #[error("experiment spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// `ε(T) = √(k·ln(n/10) / (100·T))`: the calibration under which a
/// horizon-T game is exactly hard enough that low regret forces
/// identification. Rejects `n ≤ 10` (the formula's logarithm collapses).
pub fn auto_epsilon(batch_count: u32, batch_size: u32, horizon: u64) -> Result<f64, HarnessError> {
    if batch_size <= 10 {
        return Err(HarnessError::AutoEpsilonSmallBatch { batch_size });
    }
    assert!(horizon >= 1);
    let log_term = (f64::from(batch_size) / 10.0).ln();
    Ok((f64::from(batch_count) * log_term / (100.0 * horizon as f64)).sqrt())
}

/// A number or the string `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rate {
    Value(f64),
    Auto(AutoTag),
}

/// The literal string `"auto"` (as its own type so serde can reject typos).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoTag {
    #[serde(rename = "auto")]
    Auto,
}

impl Rate {
    pub fn resolve(self, auto: impl FnOnce() -> f64) -> f64 {
        match self {
            Rate::Value(x) => x,
            Rate::Auto(_) => auto(),
        }
    }
}

/// Epsilon column of the grid: explicit values, a single value, or the
/// horizon-calibrated automatic choice (`"auto"`; `"theorem1"` is accepted
/// as an alias).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    Single(f64),
    Values(Vec<f64>),
    Mode(String),
}

impl EpsilonSpec {
    pub fn is_auto(&self) -> Result<bool, HarnessError> {
        match self {
            EpsilonSpec::Single(_) | EpsilonSpec::Values(_) => Ok(false),
            EpsilonSpec::Mode(m) if m == "auto" || m == "theorem1" => Ok(true),
            EpsilonSpec::Mode(m) => Err(HarnessError::Spec(format!(
                "epsilon mode {m:?} not recognized (use \"auto\" or explicit values)"
            ))),
        }
    }

    fn explicit_values(&self) -> Vec<f64> {
        match self {
            EpsilonSpec::Single(e) => vec![*e],
            EpsilonSpec::Values(v) => v.clone(),
            EpsilonSpec::Mode(_) => Vec::new(),
        }
    }
}

/// Strategy set: an explicit list, or `"all"` for the null strategy plus
/// every special position the cell admits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategySet {
    Keyword(String),
    List(Vec<StrategyId>),
}

impl StrategySet {
    pub fn expand(&self, cfg: &GameConfig) -> Result<Vec<StrategyId>, HarnessError> {
        match self {
            StrategySet::List(list) => Ok(list.clone()),
            StrategySet::Keyword(kw) if kw == "all" => {
                let mut out = vec![StrategyId::Null];
                for batch in 1..=cfg.batch_count {
                    for index in 1..=cfg.batch_size {
                        out.push(StrategyId::Special { batch, index });
                    }
                }
                Ok(out)
            }
            StrategySet::Keyword(kw) => Err(HarnessError::Spec(format!(
                "strategy set {kw:?} not recognized (use \"all\" or an explicit list)"
            ))),
        }
    }
}

/// One learner configuration in a spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub learner: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Rate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Rate>,
    /// Restrict the learner to last round's advice.
    #[serde(default)]
    pub proper: bool,
    /// Arm for the `fixed` learner (defaults to the safe arm).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm: Option<ArmId>,
}

impl LearnerSpec {
    pub fn named(kind: &str) -> Self {
        LearnerSpec {
            learner: kind.to_string(),
            eta: None,
            gamma: None,
            proper: false,
            arm: None,
        }
    }

    /// Stable label used in output CSV columns.
    pub fn label(&self) -> String {
        let mut label = match self.learner.as_str() {
            "fixed" => format!("fixed:{}", self.arm.unwrap_or(ArmId::Zero)),
            other => other.to_string(),
        };
        if self.proper {
            label.push_str("-proper");
        }
        label
    }
}

/// Instantiates the learner a spec describes for one cell. `strategy` only
/// matters for the oracle learner.
pub fn build_learner(
    spec: &LearnerSpec,
    cfg: &GameConfig,
    strategy: StrategyId,
) -> Result<Box<dyn Learner>, HarnessError> {
    let base: Box<dyn Learner> = match spec.learner.as_str() {
        "exp4" => {
            let eta = spec
                .eta
                .unwrap_or(Rate::Auto(AutoTag::Auto))
                .resolve(|| Exp4::auto_eta(cfg));
            let gamma = spec
                .gamma
                .unwrap_or(Rate::Auto(AutoTag::Auto))
                .resolve(|| Exp4::auto_gamma(cfg));
            Box::new(Exp4::new(cfg, eta, gamma))
        }
        "uniform" => Box::new(UniformRandom::new(cfg)),
        "oracle" => Box::new(OracleLearner::new(strategy)),
        "fixed" => {
            let arm = spec.arm.unwrap_or(ArmId::Zero);
            if !cfg.contains_arm(arm) {
                return Err(HarnessError::Spec(format!(
                    "fixed learner arm {arm} outside instance"
                )));
            }
            Box::new(FixedArm::new(arm))
        }
        other => return Err(HarnessError::UnknownLearner(other.to_string())),
    };
    Ok(if spec.proper {
        Box::new(ProperDelay::new(base, cfg))
    } else {
        base
    })
}

/// Grid axes of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "K")]
    pub arm_counts: Vec<u32>,
    #[serde(rename = "N")]
    pub expert_counts: Vec<u32>,
    #[serde(rename = "T")]
    pub horizons: Vec<u64>,
    pub epsilon: EpsilonSpec,
}

fn default_trials() -> u64 {
    100
}

/// Declarative sweep document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    pub grid: GridSpec,
    pub strategies: StrategySet,
    pub learners: Vec<LearnerSpec>,
    pub output_dir: PathBuf,
    /// Worker cap for this run; the `BANDITLAB_THREADS` env var caps it
    /// further.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Also write one full trace CSV per (cell, trial). Large.
    #[serde(default)]
    pub export_traces: bool,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.grid.epsilon.is_auto()?;
        if spec.learners.is_empty() {
            return Err(HarnessError::Spec("no learners listed".into()));
        }
        if spec.trials == 0 {
            return Err(HarnessError::Spec("trials must be ≥ 1".into()));
        }
        Ok(spec)
    }
}

/// One fully resolved grid cell.
#[derive(Debug, Clone)]
pub struct Cell {
    pub arm_count: u32,
    pub expert_count: u32,
    pub horizon: u64,
    pub epsilon: f64,
    pub strategy: StrategyId,
    pub learner: usize,
}

impl Cell {
    /// Identifier used in the per-trial CSV.
    pub fn id(&self, learner_label: &str) -> String {
        format!(
            "K{}-N{}-T{}-e{}-{}-{}",
            self.arm_count, self.expert_count, self.horizon, self.epsilon, self.strategy,
            learner_label
        )
    }
}

/// Expands the grid into cells. Cells that cannot be formed (dimension or
/// auto-ε errors, strategies that do not fit) are reported as failure
/// strings, not errors; the rest of the sweep proceeds.
pub fn resolve_cells(spec: &ExperimentSpec) -> (Vec<Cell>, Vec<String>) {
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for &arm_count in &spec.grid.arm_counts {
        for &expert_count in &spec.grid.expert_counts {
            let cfg0 = match GameConfig::new(arm_count, expert_count, 1, 0.1, spec.seed) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("K{arm_count}-N{expert_count}: {e}"));
                    continue;
                }
            };
            let strategies = match spec.strategies.expand(&cfg0) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("K{arm_count}-N{expert_count}: {e}"));
                    continue;
                }
            };
            for &horizon in &spec.grid.horizons {
                let epsilons = if spec.grid.epsilon.is_auto().unwrap_or(false) {
                    match auto_epsilon(cfg0.batch_count, cfg0.batch_size, horizon) {
                        Ok(e) => vec![e],
                        Err(e) => {
                            failures
                                .push(format!("K{arm_count}-N{expert_count}-T{horizon}: {e}"));
                            continue;
                        }
                    }
                } else {
                    spec.grid.epsilon.explicit_values()
                };
                for &epsilon in &epsilons {
                    for &strategy in &strategies {
                        if let Err(e) = cfg0.validate_strategy(strategy) {
                            failures.push(format!(
                                "K{arm_count}-N{expert_count}-T{horizon}-e{epsilon}: {e}"
                            ));
                            continue;
                        }
                        for learner in 0..spec.learners.len() {
                            cells.push(Cell {
                                arm_count,
                                expert_count,
                                horizon,
                                epsilon,
                                strategy,
                                learner,
                            });
                        }
                    }
                }
            }
        }
    }
    (cells, failures)
}
