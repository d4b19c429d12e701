//! The adaptive batched environment.
//!
//! Arms outside arm 0 come in pairs (batches); each round exactly one side of
//! every pair is *correct* (loss 0) and the other suffers loss 1. Every
//! expert of batch `u` holds one advice bit naming a side of that pair. The
//! environment is adaptive in exactly one way: after the learner pulls a
//! paired arm, that batch's advice bits are redrawn fresh; all other advice
//! stays put. Under the null strategy every pair's correct side is a fair
//! coin. Under `Special { batch, index }` the advised side of that single
//! expert is correct with probability 1/2 + ε, which is the only statistical
//! trace of the special expert anywhere in the game.
//!
//! Arm 0 is safe but slightly lossy — Bernoulli(1/2 − ε/2) — under every
//! strategy, so it beats guessing in an unknown batch yet loses to following
//! the special expert.

use std::io::Write;

use serde_json::json;
use thiserror::Error;

use crate::config::{ArmId, ConfigError, GameConfig, StrategyId};
use crate::learners::{Learner, LearnerError};
use crate::rng::RngStream;

/// Hard cap on `records × k × n` cells for advice export, to keep accidental
/// full-horizon dumps from writing gigabytes.
pub const ADVICE_EXPORT_CELL_CAP: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("pulled arm {arm} not in instance (k={batch_count}, {padded} padded arms)")]
    InvalidArm {
        arm: String,
        batch_count: u32,
        padded: u32,
    },
    #[error("horizon exhausted: T={horizon} rounds already played")]
    HorizonExhausted { horizon: u64 },
    #[error("advice export of {cells} cells exceeds cap of {cap}")]
    AdviceExportTooLarge { cells: u64, cap: u64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error("trace io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for ProtocolError {
    fn from(e: csv::Error) -> Self {
        ProtocolError::Io(std::io::Error::other(e))
    }
}

/// The advice table: one bit per (batch, expert-in-batch) slot, stored flat
/// in batch-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdviceState {
    batch_count: u32,
    batch_size: u32,
    bits: Vec<u8>,
}

impl AdviceState {
    /// Table with every bit drawn fair, one stream per batch.
    pub fn init(batch_count: u32, batch_size: u32, rngs: &mut [RngStream]) -> Self {
        let mut state = Self::zeros(batch_count, batch_size);
        for u in 1..=batch_count {
            state.refresh_batch(u, &mut rngs[u as usize - 1]);
        }
        state
    }

    /// All-zero table (used by the delayed-advice wrapper for round 1).
    pub fn zeros(batch_count: u32, batch_size: u32) -> Self {
        AdviceState {
            batch_count,
            batch_size,
            bits: vec![0; (batch_count * batch_size) as usize],
        }
    }

    /// Table with explicit bits, batch-major. Panics unless
    /// `bits.len() == batch_count * batch_size` and every entry is 0/1.
    pub fn from_bits(batch_count: u32, batch_size: u32, bits: Vec<u8>) -> Self {
        assert_eq!(bits.len(), (batch_count * batch_size) as usize);
        assert!(bits.iter().all(|&b| b <= 1));
        AdviceState {
            batch_count,
            batch_size,
            bits,
        }
    }

    /// Overwrites one batch's bits in place.
    pub fn set_batch(&mut self, batch: u32, bits: &[u8]) {
        let n = self.batch_size as usize;
        assert_eq!(bits.len(), n);
        let start = (batch as usize - 1) * n;
        self.bits[start..start + n].copy_from_slice(bits);
    }

    pub fn batch_count(&self) -> u32 {
        self.batch_count
    }

    pub fn batch_size(&self) -> u32 {
        self.batch_size
    }

    /// Advice bits of batch `u ∈ 1..=k`.
    #[inline]
    pub fn batch(&self, batch: u32) -> &[u8] {
        let n = self.batch_size as usize;
        let start = (batch as usize - 1) * n;
        &self.bits[start..start + n]
    }

    /// Advice bit of expert `index ∈ 1..=n` in batch `batch`.
    #[inline]
    pub fn advised_side(&self, batch: u32, index: u32) -> u8 {
        self.bits[(batch as usize - 1) * self.batch_size as usize + (index as usize - 1)]
    }

    /// Redraws one batch's bits; every other batch is untouched.
    pub fn refresh_batch(&mut self, batch: u32, rng: &mut RngStream) {
        let n = self.batch_size as usize;
        let start = (batch as usize - 1) * n;
        rng.fill_fair_bits(&mut self.bits[start..start + n]);
    }

    /// FNV-1a over dimensions and bits; stable across runs, used in trace
    /// rows to spot advice changes cheaply.
    pub fn hash64(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        let prime = 0x0000_0100_0000_01b3u64;
        for word in [u64::from(self.batch_count), u64::from(self.batch_size)] {
            for b in word.to_le_bytes() {
                h = (h ^ u64::from(b)).wrapping_mul(prime);
            }
        }
        for &b in &self.bits {
            h = (h ^ u64::from(b)).wrapping_mul(prime);
        }
        h
    }
}

/// One round's loss assignment: the safe arm's loss plus, per batch, which
/// side is correct. Pair losses are recovered as `side != correct`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LossVector {
    pub zero_loss: u8,
    correct: Vec<u8>,
}

impl LossVector {
    pub fn zeroed(batch_count: u32) -> Self {
        LossVector {
            zero_loss: 0,
            correct: vec![0; batch_count as usize],
        }
    }

    /// Side of pair `batch` with loss 0 this round.
    #[inline]
    pub fn correct_side(&self, batch: u32) -> u8 {
        self.correct[batch as usize - 1]
    }

    #[inline]
    pub fn set_correct_side(&mut self, batch: u32, side: u8) {
        self.correct[batch as usize - 1] = side;
    }

    /// Loss of an arm under this assignment. Padded arms always lose.
    #[inline]
    pub fn loss(&self, arm: ArmId) -> u8 {
        match arm {
            ArmId::Zero => self.zero_loss,
            ArmId::Pair { batch, side } => u8::from(side != self.correct[batch as usize - 1]),
            ArmId::Padded(_) => 1,
        }
    }

    /// Correct sides as a bitstring, batch 1 first (for trace rows).
    pub fn correct_bits_string(&self) -> String {
        self.correct.iter().map(|&c| char::from(b'0' + c)).collect()
    }
}

/// Draws one round of losses into `out`, conditional on the current advice.
///
/// * arm 0: Bernoulli(1/2 − ε/2) from `zero_rng`;
/// * non-special batch `u`: correct side is a fair coin from `batch_rngs[u-1]`;
/// * special batch: the special expert's advised side is correct with
///   probability 1/2 + ε.
pub fn draw_losses_into(
    strategy: StrategyId,
    advice: &AdviceState,
    epsilon: f64,
    zero_rng: &mut RngStream,
    batch_rngs: &mut [RngStream],
    out: &mut LossVector,
) {
    out.zero_loss = zero_rng.bernoulli(0.5 - epsilon / 2.0);
    for u in 1..=advice.batch_count() {
        let rng = &mut batch_rngs[u as usize - 1];
        let correct = match strategy {
            StrategyId::Special { batch, index } if batch == u => {
                let advised = advice.advised_side(u, index);
                if rng.f64() < 0.5 + epsilon {
                    advised
                } else {
                    1 - advised
                }
            }
            _ => rng.fair_bit(),
        };
        out.set_correct_side(u, correct);
    }
}

/// Allocating convenience wrapper around [`draw_losses_into`].
pub fn draw_losses(
    strategy: StrategyId,
    advice: &AdviceState,
    epsilon: f64,
    zero_rng: &mut RngStream,
    batch_rngs: &mut [RngStream],
) -> LossVector {
    let mut out = LossVector::zeroed(advice.batch_count());
    draw_losses_into(strategy, advice, epsilon, zero_rng, batch_rngs, &mut out);
    out
}

/// The best expert in expectation and its exact per-round loss rate: expert
/// 0 at `1/2 − ε/2` under the null strategy, the special expert at `1/2 − ε`
/// otherwise. Pseudo-regret is always measured against this comparator.
pub fn comparator_expected_loss(
    cfg: &GameConfig,
    strategy: StrategyId,
) -> (crate::config::ExpertId, f64) {
    match strategy {
        StrategyId::Null => (crate::config::ExpertId::Zero, 0.5 - cfg.epsilon / 2.0),
        StrategyId::Special { batch, index } => (
            crate::config::ExpertId::Pair { batch, index },
            0.5 - cfg.epsilon,
        ),
    }
}

/// Everything that happened in one recorded round.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub round: u64,
    pub advice: AdviceState,
    pub pulled: ArmId,
    pub losses: LossVector,
    pub revealed: u8,
}

/// The environment for one trial: advice table, loss streams, and the
/// refresh-on-pull rule. All randomness comes from streams labeled off
/// `cfg.seed` and the trial index, so a trial is reproducible in isolation.
pub struct Environment {
    cfg: GameConfig,
    strategy: StrategyId,
    advice: AdviceState,
    advice_rngs: Vec<RngStream>,
    zero_rng: RngStream,
    batch_rngs: Vec<RngStream>,
    losses: LossVector,
    rounds_played: u64,
}

impl Environment {
    pub fn new(cfg: &GameConfig, strategy: StrategyId, trial: u64) -> Result<Self, ProtocolError> {
        cfg.validate_strategy(strategy)?;
        let mut advice_rngs: Vec<RngStream> = (1..=cfg.batch_count)
            .map(|u| RngStream::labeled(cfg.seed, "advice", u64::from(u), trial))
            .collect();
        let batch_rngs = (1..=cfg.batch_count)
            .map(|u| RngStream::labeled(cfg.seed, "loss", u64::from(u), trial))
            .collect();
        let zero_rng = RngStream::labeled(cfg.seed, "loss-zero", 0, trial);
        let advice = AdviceState::init(cfg.batch_count, cfg.batch_size, &mut advice_rngs);
        Ok(Environment {
            cfg: *cfg,
            strategy,
            advice,
            advice_rngs,
            zero_rng,
            batch_rngs,
            losses: LossVector::zeroed(cfg.batch_count),
            rounds_played: 0,
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.cfg
    }

    pub fn strategy(&self) -> StrategyId {
        self.strategy
    }

    /// Advice the learner would see if it chose now.
    pub fn advice(&self) -> &AdviceState {
        &self.advice
    }

    pub fn rounds_played(&self) -> u64 {
        self.rounds_played
    }

    /// Losses drawn in the most recent round (all arms, for analysis only —
    /// the game itself reveals a single entry).
    pub fn last_losses(&self) -> &LossVector {
        &self.losses
    }

    fn check_arm(&self, arm: ArmId) -> Result<(), ProtocolError> {
        if self.cfg.contains_arm(arm) {
            Ok(())
        } else {
            Err(ProtocolError::InvalidArm {
                arm: arm.to_string(),
                batch_count: self.cfg.batch_count,
                padded: self.cfg.padding.arms,
            })
        }
    }

    /// Plays one round with an externally chosen arm and returns the revealed
    /// loss. Draws losses against the current advice, then refreshes the
    /// pulled batch (if any).
    pub fn step(&mut self, pulled: ArmId) -> Result<u8, ProtocolError> {
        self.check_arm(pulled)?;
        if self.rounds_played >= self.cfg.horizon {
            return Err(ProtocolError::HorizonExhausted {
                horizon: self.cfg.horizon,
            });
        }
        draw_losses_into(
            self.strategy,
            &self.advice,
            self.cfg.epsilon,
            &mut self.zero_rng,
            &mut self.batch_rngs,
            &mut self.losses,
        );
        let revealed = self.losses.loss(pulled);
        self.rounds_played += 1;
        if let ArmId::Pair { batch, .. } = pulled {
            self.advice
                .refresh_batch(batch, &mut self.advice_rngs[batch as usize - 1]);
        }
        Ok(revealed)
    }

    /// Plays one round driven by a learner (choose → reveal → observe),
    /// without recording. The learner's observation sees the advice it chose
    /// against; the refresh happens after.
    pub fn step_learner(
        &mut self,
        learner: &mut dyn Learner,
        rng: &mut RngStream,
    ) -> Result<(ArmId, u8), ProtocolError> {
        let pulled = learner.choose(&self.advice, rng);
        self.check_arm(pulled)?;
        if self.rounds_played >= self.cfg.horizon {
            return Err(ProtocolError::HorizonExhausted {
                horizon: self.cfg.horizon,
            });
        }
        draw_losses_into(
            self.strategy,
            &self.advice,
            self.cfg.epsilon,
            &mut self.zero_rng,
            &mut self.batch_rngs,
            &mut self.losses,
        );
        let revealed = self.losses.loss(pulled);
        self.rounds_played += 1;
        learner.observe(&self.advice, pulled, revealed)?;
        if let ArmId::Pair { batch, .. } = pulled {
            self.advice
                .refresh_batch(batch, &mut self.advice_rngs[batch as usize - 1]);
        }
        Ok((pulled, revealed))
    }

    /// Like [`step_learner`](Self::step_learner) but records the full round
    /// (advice snapshot, complete loss vector) for trace export.
    pub fn run_round(
        &mut self,
        learner: &mut dyn Learner,
        rng: &mut RngStream,
    ) -> Result<RoundRecord, ProtocolError> {
        let advice = self.advice.clone();
        let (pulled, revealed) = self.step_learner(learner, rng)?;
        Ok(RoundRecord {
            round: self.rounds_played,
            advice,
            pulled,
            losses: self.losses.clone(),
            revealed,
        })
    }
}

/// Recorded trial.
pub struct Trace {
    pub cfg: GameConfig,
    pub strategy: StrategyId,
    pub records: Vec<RoundRecord>,
}

impl Trace {
    /// Records a full trial of `rounds` rounds.
    pub fn record(
        env: &mut Environment,
        learner: &mut dyn Learner,
        rng: &mut RngStream,
        rounds: u64,
    ) -> Result<Self, ProtocolError> {
        let mut records = Vec::with_capacity(rounds as usize);
        for _ in 0..rounds {
            records.push(env.run_round(learner, rng)?);
        }
        Ok(Trace {
            cfg: *env.config(),
            strategy: env.strategy(),
            records,
        })
    }

    /// Total revealed loss over the trace.
    pub fn realized_loss(&self) -> u64 {
        self.records.iter().map(|r| u64::from(r.revealed)).sum()
    }

    /// One row per round: `t, arm, loss, correct_bits, advice_hash`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), ProtocolError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "arm", "loss", "correct_bits", "advice_hash"])?;
        for r in &self.records {
            wtr.write_record([
                r.round.to_string(),
                r.pulled.to_string(),
                r.revealed.to_string(),
                r.losses.correct_bits_string(),
                format!("{:016x}", r.advice.hash64()),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// One JSON object per round with the full advice table. Refuses exports
    /// above [`ADVICE_EXPORT_CELL_CAP`] advice cells.
    pub fn write_advice_jsonl<W: Write>(&self, mut w: W) -> Result<(), ProtocolError> {
        let cells = self.records.len() as u64
            * u64::from(self.cfg.batch_count)
            * u64::from(self.cfg.batch_size);
        if cells > ADVICE_EXPORT_CELL_CAP {
            return Err(ProtocolError::AdviceExportTooLarge {
                cells,
                cap: ADVICE_EXPORT_CELL_CAP,
            });
        }
        for r in &self.records {
            let batches: Vec<Vec<u8>> = (1..=self.cfg.batch_count)
                .map(|u| r.advice.batch(u).to_vec())
                .collect();
            let line = json!({ "t": r.round, "advice": batches });
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}
