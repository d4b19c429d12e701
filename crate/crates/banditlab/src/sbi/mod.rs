//! The special-batch identification game and its reductions.
//!
//! Identification strips the bandit game down to its informational core: the
//! player repeatedly picks a batch (never the safe arm), observes that
//! batch's advice together with its correct side, and eventually names the
//! batch holding the special expert — or 0 to claim there is none. Anything
//! that plays the full bandit game well can be converted into a good
//! identifier ([`sbi_reduce`]), and any identifier for the one-batch game
//! can be run against a single batch of a larger game
//! ([`OneBatchEmbedding`]), which is what makes single-batch lower bounds
//! transfer.

mod embed;

pub use embed::{embed_one_batch, FrequencyProbe, OneBatchEmbedding};

use serde::Serialize;
use thiserror::Error;

use crate::adversary::{comparator_expected_loss, AdviceState, Environment, ProtocolError};
use crate::config::{ArmId, GameConfig, StrategyId};
use crate::exec;
use crate::learners::Learner;
use crate::numeric::mean_and_stderr;
use crate::rng::RngStream;

/// Accuracy an identifier must reach on every strategy to count as good.
pub const GOOD_ACCURACY: f64 = 0.95;
/// Stricter accuracy level reported alongside the main one.
pub const STRICT_ACCURACY: f64 = 0.99;

/// Default cap on identification rounds before a run is cut off.
pub const DEFAULT_ROUND_CAP: u64 = 100_000_000;

#[derive(Debug, Error)]
pub enum SbiError {
    #[error("identifier pulled batch {batch}, outside 1..={batch_count}")]
    InvalidBatch { batch: u32, batch_count: u32 },
    #[error("identifier output {output}, outside 0..={batch_count}")]
    InvalidOutput { output: u32, batch_count: u32 },
    #[error("embedding needs a one-batch inner game, got k={batch_count}")]
    EmbedNotOneBatch { batch_count: u32 },
    #[error("embedding target batch {target} outside 1..={batch_count}")]
    EmbedTargetOutOfRange { target: u32, batch_count: u32 },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// What an identifier does each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbiAction {
    /// Observe batch `u ∈ 1..=k` this round.
    Pull(u32),
    /// Stop and name the special batch (0 = "none").
    Stop(u32),
}

/// The bit revealed after a pull, in one of two equivalent framings: the
/// correct side directly, or the loss of a named side of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbiObservation {
    CorrectArm(u8),
    RawLoss { side: u8, loss: u8 },
}

impl SbiObservation {
    /// The correct side, whichever framing carried it.
    #[inline]
    pub fn correct_bit(&self) -> u8 {
        match *self {
            SbiObservation::CorrectArm(c) => c,
            SbiObservation::RawLoss { side, loss } => {
                if loss == 0 {
                    side
                } else {
                    1 - side
                }
            }
        }
    }
}

/// Which framing the runner delivers observations in. Both carry the same
/// bit; supporting both keeps identifiers honest about what they read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObservationMode {
    #[default]
    CorrectArmBit,
    RawLoss,
}

#[derive(Debug, Clone, Copy)]
pub struct SbiOptions {
    pub round_cap: u64,
    pub mode: ObservationMode,
}

impl Default for SbiOptions {
    fn default() -> Self {
        SbiOptions {
            round_cap: DEFAULT_ROUND_CAP,
            mode: ObservationMode::default(),
        }
    }
}

/// An identification strategy. `act` sees the full advice table (same view
/// as a bandit learner); observations arrive through `observe` after each
/// pull.
pub trait SbiIdentifier {
    fn act(&mut self, advice: &AdviceState, rng: &mut RngStream) -> SbiAction;
    fn observe(&mut self, batch: u32, obs: SbiObservation);
}

#[derive(Debug, Clone, Serialize)]
pub struct SbiResult {
    /// Named batch, 0 for "no special batch".
    pub output: u32,
    /// Rounds played before stopping.
    pub stopping_round: u64,
    /// Pull counts: index `u` for batch `u`; index 0 collects safe/padded
    /// pulls (only the bandit reduction produces those).
    pub pulls: Vec<u64>,
    /// Whether the output names the strategy's special batch.
    pub correct: bool,
    /// Set when the round cap fired; the output is then forced to 0.
    pub truncated: bool,
}

/// Plays one identification run against the environment defined by
/// `(cfg, strategy, trial)`.
///
/// Each pull of batch `u` is executed as a pull of arm `(u, 0)` underneath:
/// that arm's loss *is* the batch's correct side, and pulling it triggers
/// the batch's advice refresh exactly as the full game prescribes.
pub fn run_sbi(
    identifier: &mut dyn SbiIdentifier,
    strategy: StrategyId,
    cfg: &GameConfig,
    trial: u64,
    opts: &SbiOptions,
) -> Result<SbiResult, SbiError> {
    let mut game_cfg = *cfg;
    game_cfg.horizon = u64::MAX; // the round cap, not the bandit horizon, limits this game
    let mut env = Environment::new(&game_cfg, strategy, trial)?;
    let mut rng = RngStream::labeled(cfg.seed, "identifier", 0, trial);
    let mut pulls = vec![0u64; cfg.batch_count as usize + 1];
    let mut rounds = 0u64;
    loop {
        if rounds >= opts.round_cap {
            return Ok(SbiResult {
                output: 0,
                stopping_round: rounds,
                pulls,
                correct: strategy.special_batch() == 0,
                truncated: true,
            });
        }
        match identifier.act(env.advice(), &mut rng) {
            SbiAction::Stop(output) => {
                if output > cfg.batch_count {
                    return Err(SbiError::InvalidOutput {
                        output,
                        batch_count: cfg.batch_count,
                    });
                }
                return Ok(SbiResult {
                    output,
                    stopping_round: rounds,
                    pulls,
                    correct: output == strategy.special_batch(),
                    truncated: false,
                });
            }
            SbiAction::Pull(batch) => {
                if !(1..=cfg.batch_count).contains(&batch) {
                    return Err(SbiError::InvalidBatch {
                        batch,
                        batch_count: cfg.batch_count,
                    });
                }
                let bit = env.step(ArmId::Pair { batch, side: 0 })?;
                pulls[batch as usize] += 1;
                rounds += 1;
                let obs = match opts.mode {
                    ObservationMode::CorrectArmBit => SbiObservation::CorrectArm(bit),
                    ObservationMode::RawLoss => SbiObservation::RawLoss { side: 0, loss: bit },
                };
                identifier.observe(batch, obs);
            }
        }
    }
}

/// First index attaining the maximum.
fn argmax_lowest(xs: &[u64]) -> usize {
    let mut best = 0usize;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Converts a bandit learner into an identifier: play the full game for
/// `t_star` rounds, then name the batch the learner pulled most (safe and
/// padded pulls count for output 0; ties break toward the lower index).
pub fn sbi_reduce(
    learner: &mut dyn Learner,
    t_star: u64,
    strategy: StrategyId,
    cfg: &GameConfig,
    trial: u64,
) -> Result<SbiResult, SbiError> {
    let mut game_cfg = *cfg;
    game_cfg.horizon = t_star;
    let mut env = Environment::new(&game_cfg, strategy, trial)?;
    let mut rng = RngStream::labeled(cfg.seed, "learner", 0, trial);
    let mut pulls = vec![0u64; cfg.batch_count as usize + 1];
    for _ in 0..t_star {
        let (pulled, _) = env.step_learner(learner, &mut rng)?;
        let slot = match pulled {
            ArmId::Zero | ArmId::Padded(_) => 0,
            ArmId::Pair { batch, .. } => batch as usize,
        };
        pulls[slot] += 1;
    }
    let output = argmax_lowest(&pulls) as u32;
    Ok(SbiResult {
        output,
        stopping_round: t_star,
        pulls,
        correct: output == strategy.special_batch(),
        truncated: false,
    })
}

/// Accuracy of an identifier across strategies. `good` demands
/// [`GOOD_ACCURACY`] on *every* strategy; the stricter level is reported for
/// context. `three_sigma` is the radius on the worst strategy's accuracy
/// estimate.
#[derive(Debug, Clone, Serialize)]
pub struct GoodnessReport {
    pub trials: u64,
    pub accuracies: Vec<(String, f64)>,
    pub min_accuracy: f64,
    pub three_sigma: f64,
    pub good: bool,
    pub meets_stricter: bool,
}

impl GoodnessReport {
    pub fn from_counts(counts: &[(StrategyId, u64)], trials: u64) -> Self {
        assert!(trials > 0 && !counts.is_empty());
        let accuracies: Vec<(String, f64)> = counts
            .iter()
            .map(|(s, c)| (s.to_string(), *c as f64 / trials as f64))
            .collect();
        let min_accuracy = accuracies
            .iter()
            .map(|(_, a)| *a)
            .fold(f64::INFINITY, f64::min);
        let p = min_accuracy.clamp(1e-9, 1.0 - 1e-9);
        let three_sigma = crate::numeric::binomial_three_sigma(p, trials);
        GoodnessReport {
            trials,
            accuracies,
            min_accuracy,
            three_sigma,
            good: min_accuracy >= GOOD_ACCURACY,
            meets_stricter: min_accuracy >= STRICT_ACCURACY,
        }
    }
}

/// Runs `trials` independent runs per strategy (parallel over the full
/// strategy × trial grid) and scores them. `run` must return whether the
/// run's output was correct.
pub fn measure_goodness<F>(
    strategies: &[StrategyId],
    trials: u64,
    threads: usize,
    run: F,
) -> GoodnessReport
where
    F: Fn(StrategyId, u64) -> bool + Sync,
{
    let total = strategies.len() as u64 * trials;
    let outcomes = exec::run_indexed(total, threads, |idx| {
        let strategy = strategies[(idx / trials) as usize];
        run(strategy, idx % trials)
    });
    let counts: Vec<(StrategyId, u64)> = strategies
        .iter()
        .enumerate()
        .map(|(si, &s)| {
            let base = si as u64 * trials;
            let correct = (0..trials)
                .filter(|&t| outcomes[(base + t) as usize])
                .count() as u64;
            (s, correct)
        })
        .collect();
    GoodnessReport::from_counts(&counts, trials)
}

/// Monte Carlo check that pseudo-regret dominates `ε/2 ×` the expected
/// number of rounds spent outside the comparator's batch.
#[derive(Debug, Clone, Serialize)]
pub struct PullFractionReport {
    pub trials: u64,
    pub mean_regret: f64,
    pub mean_displacement: f64,
    /// `ε/2 · mean_displacement`.
    pub displacement_bound: f64,
    /// 3σ allowance combining both estimates' standard errors.
    pub slack: f64,
    pub holds: bool,
}

/// Estimates both sides of the displacement bound for a learner over
/// `trials` runs of `t_star` rounds each.
pub fn pull_fraction_check<F>(
    cfg: &GameConfig,
    strategy: StrategyId,
    t_star: u64,
    trials: u64,
    threads: usize,
    make_learner: F,
) -> Result<PullFractionReport, SbiError>
where
    F: Fn() -> Box<dyn Learner> + Sync,
{
    let (_, rate) = comparator_expected_loss(cfg, strategy);
    let comparator_total = rate * t_star as f64;
    let special = strategy.special_batch() as usize;

    let per_trial: Vec<Result<(f64, f64), String>> = exec::run_indexed(trials, threads, |trial| {
        let mut game_cfg = *cfg;
        game_cfg.horizon = t_star;
        let mut env = Environment::new(&game_cfg, strategy, trial).map_err(|e| e.to_string())?;
        let mut rng = RngStream::labeled(cfg.seed, "learner", 0, trial);
        let mut learner = make_learner();
        let mut realized = 0u64;
        let mut in_special = 0u64;
        for _ in 0..t_star {
            let (pulled, loss) = env
                .step_learner(learner.as_mut(), &mut rng)
                .map_err(|e| e.to_string())?;
            realized += u64::from(loss);
            let slot = match pulled {
                ArmId::Zero | ArmId::Padded(_) => 0,
                ArmId::Pair { batch, .. } => batch as usize,
            };
            in_special += u64::from(slot == special);
        }
        Ok((
            realized as f64 - comparator_total,
            (t_star - in_special) as f64,
        ))
    });

    let mut regrets = Vec::with_capacity(per_trial.len());
    let mut displacements = Vec::with_capacity(per_trial.len());
    for r in per_trial {
        let (regret, disp) =
            r.map_err(|msg| SbiError::Protocol(ProtocolError::Io(std::io::Error::other(msg))))?;
        regrets.push(regret);
        displacements.push(disp);
    }
    let (mean_regret, se_regret) = mean_and_stderr(&regrets);
    let (mean_displacement, se_disp) = mean_and_stderr(&displacements);
    let displacement_bound = cfg.epsilon / 2.0 * mean_displacement;
    let slack = 3.0 * (se_regret + cfg.epsilon / 2.0 * se_disp);
    Ok(PullFractionReport {
        trials,
        mean_regret,
        mean_displacement,
        displacement_bound,
        slack,
        holds: mean_regret >= displacement_bound - slack,
    })
}
