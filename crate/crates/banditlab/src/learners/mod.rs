//! Learners for the batched advice game.
//!
//! A learner sees the current advice table, pulls one arm, and observes that
//! arm's loss — nothing else. [`Exp4`] is the reference no-regret algorithm;
//! the others are measurement instruments: [`FixedArm`] and [`UniformRandom`]
//! pin down per-round loss rates, [`OracleLearner`] plays the best response
//! to a known strategy, and [`ProperDelay`] restricts any learner to the
//! previous round's advice.

mod batch_scan;
mod exp4;

pub use batch_scan::BatchScan;
pub use exp4::Exp4;

use thiserror::Error;

use crate::adversary::AdviceState;
use crate::config::{ArmId, GameConfig, StrategyId};
use crate::rng::RngStream;

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error(
        "numerical fault: pulled-arm probability {prob:e} below guard {guard:e} in update {update}"
    )]
    NumericalFault { prob: f64, guard: f64, update: u64 },
}

pub trait Learner {
    /// Picks an arm given the advice shown this round.
    fn choose(&mut self, advice: &AdviceState, rng: &mut RngStream) -> ArmId;

    /// Receives the pulled arm's loss. `advice` is the same table `choose`
    /// saw this round (pre-refresh), so importance weights can be rebuilt.
    fn observe(&mut self, advice: &AdviceState, pulled: ArmId, loss: u8)
        -> Result<(), LearnerError>;
}

impl Learner for Box<dyn Learner> {
    fn choose(&mut self, advice: &AdviceState, rng: &mut RngStream) -> ArmId {
        (**self).choose(advice, rng)
    }

    fn observe(
        &mut self,
        advice: &AdviceState,
        pulled: ArmId,
        loss: u8,
    ) -> Result<(), LearnerError> {
        (**self).observe(advice, pulled, loss)
    }
}

/// Always pulls the same arm.
pub struct FixedArm {
    arm: ArmId,
}

impl FixedArm {
    pub fn new(arm: ArmId) -> Self {
        FixedArm { arm }
    }
}

impl Learner for FixedArm {
    fn choose(&mut self, _advice: &AdviceState, _rng: &mut RngStream) -> ArmId {
        self.arm
    }

    fn observe(&mut self, _: &AdviceState, _: ArmId, _: u8) -> Result<(), LearnerError> {
        Ok(())
    }
}

/// Pulls uniformly over all `K` arms (padded arms included).
pub struct UniformRandom {
    cfg: GameConfig,
}

impl UniformRandom {
    pub fn new(cfg: &GameConfig) -> Self {
        UniformRandom { cfg: *cfg }
    }
}

impl Learner for UniformRandom {
    fn choose(&mut self, _advice: &AdviceState, rng: &mut RngStream) -> ArmId {
        self.cfg.arm_at(rng.index(self.cfg.arm_count as usize))
    }

    fn observe(&mut self, _: &AdviceState, _: ArmId, _: u8) -> Result<(), LearnerError> {
        Ok(())
    }
}

/// Best response to a known strategy: follows the special expert's current
/// advice, or sits on arm 0 when no expert is special.
pub struct OracleLearner {
    strategy: StrategyId,
}

impl OracleLearner {
    pub fn new(strategy: StrategyId) -> Self {
        OracleLearner { strategy }
    }
}

impl Learner for OracleLearner {
    fn choose(&mut self, advice: &AdviceState, _rng: &mut RngStream) -> ArmId {
        match self.strategy {
            StrategyId::Null => ArmId::Zero,
            StrategyId::Special { batch, index } => ArmId::Pair {
                batch,
                side: advice.advised_side(batch, index),
            },
        }
    }

    fn observe(&mut self, _: &AdviceState, _: ArmId, _: u8) -> Result<(), LearnerError> {
        Ok(())
    }
}

/// Shows the wrapped learner last round's advice instead of the current
/// table (all zeros in round 1), making its choice measurable with respect
/// to already-revealed information.
pub struct ProperDelay<L> {
    inner: L,
    prev: AdviceState,
}

impl<L> ProperDelay<L> {
    pub fn new(inner: L, cfg: &GameConfig) -> Self {
        ProperDelay {
            inner,
            prev: AdviceState::zeros(cfg.batch_count, cfg.batch_size),
        }
    }
}

impl<L: Learner> Learner for ProperDelay<L> {
    fn choose(&mut self, _advice: &AdviceState, rng: &mut RngStream) -> ArmId {
        self.inner.choose(&self.prev, rng)
    }

    fn observe(
        &mut self,
        advice: &AdviceState,
        pulled: ArmId,
        loss: u8,
    ) -> Result<(), LearnerError> {
        self.inner.observe(&self.prev, pulled, loss)?;
        self.prev = advice.clone();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::Environment;

    #[test]
    fn uniform_random_covers_all_arms() {
        let cfg = GameConfig::new(6, 25, 1000, 0.1, 3).unwrap();
        let mut learner = UniformRandom::new(&cfg);
        let mut rng = RngStream::labeled(3, "learner", 0, 0);
        let advice = AdviceState::zeros(cfg.batch_count, cfg.batch_size);
        let mut counts = vec![0u32; cfg.arm_count as usize];
        for _ in 0..6000 {
            counts[cfg.arm_index(learner.choose(&advice, &mut rng))] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            // Bin(6000, 1/6): 3 sigma band around 1000 is ±~87.
            assert!((f64::from(c) - 1000.0).abs() < 120.0, "arm {i}: {c}");
        }
    }

    #[test]
    fn oracle_tracks_special_advice() {
        let cfg = GameConfig::from_reduced(2, 20, 1000, 0.1, 11);
        let strategy = StrategyId::Special { batch: 2, index: 7 };
        let mut env = Environment::new(&cfg, strategy, 0).unwrap();
        let mut learner = OracleLearner::new(strategy);
        let mut rng = RngStream::labeled(11, "learner", 0, 0);
        for _ in 0..100 {
            let advised = env.advice().advised_side(2, 7);
            let (pulled, _) = env.step_learner(&mut learner, &mut rng).unwrap();
            assert_eq!(
                pulled,
                ArmId::Pair {
                    batch: 2,
                    side: advised
                }
            );
        }
    }

    #[test]
    fn proper_delay_lags_one_round() {
        // A learner that replays expert (1,1)'s advice as a side choice lets
        // us observe exactly which table it saw.
        struct Echo {
            seen: Vec<u8>,
        }
        impl Learner for Echo {
            fn choose(&mut self, advice: &AdviceState, _rng: &mut RngStream) -> ArmId {
                self.seen.push(advice.advised_side(1, 1));
                ArmId::Pair {
                    batch: 1,
                    side: advice.advised_side(1, 1),
                }
            }
            fn observe(&mut self, _: &AdviceState, _: ArmId, _: u8) -> Result<(), LearnerError> {
                Ok(())
            }
        }

        let cfg = GameConfig::from_reduced(1, 4, 100, 0.1, 21);
        let mut env = Environment::new(&cfg, StrategyId::Null, 0).unwrap();
        let mut rng = RngStream::labeled(21, "learner", 0, 0);
        let mut learner = ProperDelay::new(Echo { seen: Vec::new() }, &cfg);

        let mut live_bits = Vec::new();
        for _ in 0..20 {
            live_bits.push(env.advice().advised_side(1, 1));
            env.step_learner(&mut learner, &mut rng).unwrap();
        }
        let seen = &learner.inner.seen;
        assert_eq!(seen[0], 0, "round 1 must see the zero table");
        // Every later round sees the table from one round back.
        assert_eq!(&seen[1..], &live_bits[..19]);
    }
}
