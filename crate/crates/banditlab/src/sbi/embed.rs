//! Running a many-batch identifier against a one-batch game.
//!
//! The wrapper owns every batch except one: it synthesizes their advice and
//! correct bits from its own streams (fair coins, refreshed on pull — the
//! exact law of non-special batches), and forwards pulls of the designated
//! target batch to the real one-batch game underneath. The wrapped
//! identifier cannot tell the difference, so its accuracy on the big game
//! transfers to the small one.

use crate::adversary::AdviceState;
use crate::config::GameConfig;
use crate::config::StrategyId;
use crate::rng::RngStream;
use crate::sbi::{
    run_sbi, ObservationMode, SbiAction, SbiError, SbiIdentifier, SbiObservation, SbiOptions,
    SbiResult,
};

/// Presents a `batch_count`-batch game to `big`, backed by a one-batch game
/// for `target` and self-served fair coins everywhere else.
pub struct OneBatchEmbedding<'a> {
    big: &'a mut dyn SbiIdentifier,
    batch_count: u32,
    target: u32,
    mode: ObservationMode,
    big_advice: AdviceState,
    advice_rngs: Vec<RngStream>,
    correct_rngs: Vec<RngStream>,
    self_served: Vec<u64>,
    serve_cap: u64,
}

impl<'a> OneBatchEmbedding<'a> {
    pub fn new(
        big: &'a mut dyn SbiIdentifier,
        batch_count: u32,
        target: u32,
        small_cfg: &GameConfig,
        trial: u64,
        mode: ObservationMode,
    ) -> Result<Self, SbiError> {
        if small_cfg.batch_count != 1 {
            return Err(SbiError::EmbedNotOneBatch {
                batch_count: small_cfg.batch_count,
            });
        }
        if !(1..=batch_count).contains(&target) {
            return Err(SbiError::EmbedTargetOutOfRange {
                target,
                batch_count,
            });
        }
        let mut advice_rngs: Vec<RngStream> = (1..=batch_count)
            .map(|u| RngStream::labeled(small_cfg.seed, "embed-advice", u64::from(u), trial))
            .collect();
        let correct_rngs = (1..=batch_count)
            .map(|u| RngStream::labeled(small_cfg.seed, "embed-correct", u64::from(u), trial))
            .collect();
        let mut big_advice = AdviceState::zeros(batch_count, small_cfg.batch_size);
        for u in 1..=batch_count {
            if u != target {
                big_advice.refresh_batch(u, &mut advice_rngs[u as usize - 1]);
            }
        }
        Ok(OneBatchEmbedding {
            big,
            batch_count,
            target,
            mode,
            big_advice,
            advice_rngs,
            correct_rngs,
            self_served: vec![0; batch_count as usize],
            serve_cap: crate::sbi::DEFAULT_ROUND_CAP,
        })
    }

    /// Pulls answered internally (not forwarded) per batch.
    pub fn self_served(&self, batch: u32) -> u64 {
        self.self_served[batch as usize - 1]
    }

    fn serve_locally(&mut self, batch: u32) {
        let ix = batch as usize - 1;
        let c = self.correct_rngs[ix].fair_bit();
        let obs = match self.mode {
            ObservationMode::CorrectArmBit => SbiObservation::CorrectArm(c),
            ObservationMode::RawLoss => SbiObservation::RawLoss { side: 0, loss: c },
        };
        self.self_served[ix] += 1;
        self.big.observe(batch, obs);
        self.big_advice.refresh_batch(batch, &mut self.advice_rngs[ix]);
    }
}

impl SbiIdentifier for OneBatchEmbedding<'_> {
    fn act(&mut self, advice: &AdviceState, rng: &mut RngStream) -> SbiAction {
        // The target column mirrors the live one-batch game; it changes
        // exactly when that game refreshes, i.e. after forwarded pulls.
        self.big_advice.set_batch(self.target, advice.batch(1));
        loop {
            match self.big.act(&self.big_advice, rng) {
                SbiAction::Pull(u) if u == self.target => return SbiAction::Pull(1),
                SbiAction::Pull(u) => {
                    assert!(
                        (1..=self.batch_count).contains(&u),
                        "embedded identifier pulled batch {u} of {}",
                        self.batch_count
                    );
                    let served: u64 = self.self_served.iter().sum();
                    if served >= self.serve_cap {
                        return SbiAction::Stop(0);
                    }
                    self.serve_locally(u);
                }
                SbiAction::Stop(j) => {
                    return SbiAction::Stop(u32::from(j == self.target));
                }
            }
        }
    }

    fn observe(&mut self, _batch: u32, obs: SbiObservation) {
        self.big.observe(self.target, obs);
    }
}

/// Runs `big` (an identifier for a `batch_count`-batch game) against the
/// one-batch game `(small_cfg, strategy, trial)` with batch `target` as the
/// live one. The result is scored in the small game: output 1 iff `big`
/// named the target.
pub fn embed_one_batch(
    big: &mut dyn SbiIdentifier,
    batch_count: u32,
    target: u32,
    small_cfg: &GameConfig,
    strategy: StrategyId,
    trial: u64,
    opts: &SbiOptions,
) -> Result<SbiResult, SbiError> {
    let mut wrapper = OneBatchEmbedding::new(big, batch_count, target, small_cfg, trial, opts.mode)?;
    run_sbi(&mut wrapper, strategy, small_cfg, trial, opts)
}

/// Measurement identifier: pulls batches round-robin a fixed number of times
/// and records, per pull, the pulled batch's advice bits, the revealed
/// correct side, and their per-expert agreement. Each pull sees a fresh
/// advice draw (tables refresh on pull), so the recorded samples are
/// independent and the usual binomial bands apply.
pub struct FrequencyProbe {
    batch_count: u32,
    batch_size: u32,
    rounds_per_batch: u64,
    issued: u64,
    pending_batch: Option<u32>,
    pending_bits: Vec<u8>,
    pulls: Vec<u64>,
    advice_ones: Vec<u64>,
    correct_ones: Vec<u64>,
    match_ones: Vec<u64>,
}

impl FrequencyProbe {
    pub fn new(batch_count: u32, batch_size: u32, rounds_per_batch: u64) -> Self {
        let slots = (batch_count * batch_size) as usize;
        FrequencyProbe {
            batch_count,
            batch_size,
            rounds_per_batch,
            issued: 0,
            pending_batch: None,
            pending_bits: vec![0; batch_size as usize],
            pulls: vec![0; batch_count as usize],
            advice_ones: vec![0; slots],
            correct_ones: vec![0; batch_count as usize],
            match_ones: vec![0; slots],
        }
    }

    fn slot(&self, batch: u32, index: u32) -> usize {
        (batch as usize - 1) * self.batch_size as usize + (index as usize - 1)
    }

    pub fn pulls(&self, batch: u32) -> u64 {
        self.pulls[batch as usize - 1]
    }

    /// Fraction of batch pulls where expert `index`'s advice bit was 1.
    pub fn advice_frequency(&self, batch: u32, index: u32) -> f64 {
        self.advice_ones[self.slot(batch, index)] as f64 / self.pulls(batch) as f64
    }

    /// Fraction of batch pulls where side 1 was correct.
    pub fn correct_frequency(&self, batch: u32) -> f64 {
        self.correct_ones[batch as usize - 1] as f64 / self.pulls(batch) as f64
    }

    /// Fraction of batch pulls where expert `index`'s advice named the
    /// correct side.
    pub fn match_frequency(&self, batch: u32, index: u32) -> f64 {
        self.match_ones[self.slot(batch, index)] as f64 / self.pulls(batch) as f64
    }
}

impl SbiIdentifier for FrequencyProbe {
    fn act(&mut self, advice: &AdviceState, _rng: &mut RngStream) -> SbiAction {
        if self.issued >= self.rounds_per_batch * u64::from(self.batch_count) {
            return SbiAction::Stop(0);
        }
        let batch = (self.issued % u64::from(self.batch_count)) as u32 + 1;
        self.pending_bits.copy_from_slice(advice.batch(batch));
        for (v, &b) in self.pending_bits.iter().enumerate() {
            self.advice_ones[(batch as usize - 1) * self.batch_size as usize + v] +=
                u64::from(b);
        }
        self.pending_batch = Some(batch);
        self.issued += 1;
        SbiAction::Pull(batch)
    }

    fn observe(&mut self, batch: u32, obs: SbiObservation) {
        let pending = self.pending_batch.take().expect("observation without pull");
        debug_assert_eq!(pending, batch);
        let c = obs.correct_bit();
        let ix = batch as usize - 1;
        self.pulls[ix] += 1;
        self.correct_ones[ix] += u64::from(c);
        for (v, &b) in self.pending_bits.iter().enumerate() {
            self.match_ones[ix * self.batch_size as usize + v] += u64::from(b == c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::BatchScan;
    use crate::numeric::binomial_three_sigma;

    fn small_cfg(seed: u64) -> GameConfig {
        GameConfig::from_reduced(1, 20, 1_000_000, 0.1, seed)
    }

    #[test]
    fn embedding_rejects_bad_dimensions() {
        let two_batch = GameConfig::from_reduced(2, 20, 100, 0.1, 0);
        let mut probe = FrequencyProbe::new(3, 20, 10);
        assert!(matches!(
            OneBatchEmbedding::new(&mut probe, 3, 1, &two_batch, 0, ObservationMode::CorrectArmBit),
            Err(SbiError::EmbedNotOneBatch { .. })
        ));
        let one_batch = small_cfg(0);
        let mut probe = FrequencyProbe::new(3, 20, 10);
        assert!(matches!(
            OneBatchEmbedding::new(&mut probe, 3, 4, &one_batch, 0, ObservationMode::CorrectArmBit),
            Err(SbiError::EmbedTargetOutOfRange { .. })
        ));
    }

    #[test]
    fn output_mapping_unit_cases() {
        // Big identifier stops immediately with output j; small result must
        // be 1 exactly when j names the target batch.
        struct Scripted(u32);
        impl SbiIdentifier for Scripted {
            fn act(&mut self, _: &AdviceState, _: &mut RngStream) -> SbiAction {
                SbiAction::Stop(self.0)
            }
            fn observe(&mut self, _: u32, _: SbiObservation) {}
        }
        let cfg = small_cfg(5);
        let opts = SbiOptions::default();
        let target = 2;
        for (big_output, small_expected) in [(0u32, 0u32), (1, 0), (2, 1), (3, 0)] {
            let mut s = Scripted(big_output);
            let r =
                embed_one_batch(&mut s, 3, target, &cfg, StrategyId::Null, 0, &opts).unwrap();
            assert_eq!(r.output, small_expected, "big output {big_output}");
        }
    }

    #[test]
    fn forwarded_pulls_line_up_with_probe_counts() {
        let cfg = small_cfg(7);
        let opts = SbiOptions::default();
        let mut probe = FrequencyProbe::new(3, 20, 500);
        let r = embed_one_batch(
            &mut probe,
            3,
            2,
            &cfg,
            StrategyId::Special { batch: 1, index: 4 },
            0,
            &opts,
        )
        .unwrap();
        // Probe pulled each big batch 500 times; only target pulls reach the
        // small game.
        assert_eq!(r.pulls[1], 500);
        assert_eq!(r.stopping_round, 500);
        for u in 1..=3 {
            assert_eq!(probe.pulls(u), 500);
        }
    }

    #[test]
    fn embedded_statistics_match_the_real_game() {
        let cfg = small_cfg(11);
        let opts = SbiOptions::default();
        let rounds = 20_000u64;
        let strategy = StrategyId::Special { batch: 1, index: 3 };
        let mut probe = FrequencyProbe::new(2, 20, rounds);
        embed_one_batch(&mut probe, 2, 1, &cfg, strategy, 0, &opts).unwrap();

        let band_half = binomial_three_sigma(0.5, rounds);
        let band_special = binomial_three_sigma(0.6, rounds);
        // Target batch (live game): special expert matches at 1/2 + ε.
        let special_match = probe.match_frequency(1, 3);
        assert!(
            (special_match - 0.6).abs() < band_special,
            "special match {special_match}"
        );
        // Everything else sits at 1/2: bystander expert in the live batch,
        // all experts in the synthetic batch, correct bits in both.
        for (u, v) in [(1u32, 7u32), (2, 3), (2, 11)] {
            let f = probe.match_frequency(u, v);
            assert!((f - 0.5).abs() < band_half, "match ({u},{v}) = {f}");
        }
        for u in 1..=2 {
            let f = probe.correct_frequency(u);
            assert!((f - 0.5).abs() < band_half, "correct({u}) = {f}");
            let a = probe.advice_frequency(u, 5);
            assert!((a - 0.5).abs() < band_half, "advice({u},5) = {a}");
        }
    }

    #[test]
    fn batch_scan_through_embedding_finds_the_target() {
        let cfg = small_cfg(13);
        let opts = SbiOptions::default();
        let mut hits = 0;
        for trial in 0..10 {
            let mut scan = BatchScan::with_default_budget(3, 20, 0.1);
            let r = embed_one_batch(
                &mut scan,
                3,
                2,
                &cfg,
                StrategyId::Special { batch: 1, index: 9 },
                trial,
                &opts,
            )
            .unwrap();
            hits += u32::from(r.output == 1 && r.correct);
        }
        assert!(hits >= 9, "hits {hits}/10");

        // Null small game: the scan should clear all batches and output 0.
        let mut misses = 0;
        for trial in 0..10 {
            let mut scan = BatchScan::with_default_budget(3, 20, 0.1);
            let r = embed_one_batch(&mut scan, 3, 2, &cfg, StrategyId::Null, trial, &opts)
                .unwrap();
            misses += u32::from(r.output == 0 && r.correct);
        }
        assert!(misses >= 9, "null hits {misses}/10");
    }
}
