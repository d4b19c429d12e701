//! Sequential-scan identifier.
//!
//! Spends a fixed budget of `m` pulls on batch 1, counting how often each
//! expert's advice bit agrees with the revealed correct side; if some expert
//! clears the acceptance threshold `θ = m(1/2 + ε/2)` the batch is declared
//! special, otherwise the scan moves on. A bystander expert matches at rate
//! 1/2 and the special one at 1/2 + ε, so θ sits midway between the two
//! means and the default budget makes both error modes exponentially rare.

use crate::adversary::AdviceState;
use crate::rng::RngStream;
use crate::sbi::{SbiAction, SbiIdentifier, SbiObservation};

/// Per-run failure probability the default budget is sized for.
pub const DEFAULT_FAILURE_PROB: f64 = 0.01;

pub struct BatchScan {
    batch_count: u32,
    budget: u64,
    threshold: f64,
    current_batch: u32,
    pulls_in_batch: u64,
    counts: Vec<u64>,
    pending_bits: Vec<u8>,
    has_pending: bool,
    decision: Option<u32>,
}

impl BatchScan {
    pub fn new(batch_count: u32, batch_size: u32, epsilon: f64, budget: u64) -> Self {
        BatchScan {
            batch_count,
            budget,
            threshold: budget as f64 * (0.5 + epsilon / 2.0),
            current_batch: 1,
            pulls_in_batch: 0,
            counts: vec![0; batch_size as usize],
            pending_bits: vec![0; batch_size as usize],
            has_pending: false,
            decision: None,
        }
    }

    /// `m = ⌈8·ln(n/δ)/ε²⌉`: at this budget a Chernoff bound puts both the
    /// miss and false-alarm probability of one batch under δ.
    pub fn default_budget(batch_size: u32, epsilon: f64, delta: f64) -> u64 {
        assert!(epsilon > 0.0 && delta > 0.0);
        (8.0 * (f64::from(batch_size) / delta).ln() / (epsilon * epsilon)).ceil() as u64
    }

    pub fn with_default_budget(batch_count: u32, batch_size: u32, epsilon: f64) -> Self {
        let budget = Self::default_budget(batch_size, epsilon, DEFAULT_FAILURE_PROB);
        Self::new(batch_count, batch_size, epsilon, budget)
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl SbiIdentifier for BatchScan {
    fn act(&mut self, advice: &AdviceState, _rng: &mut RngStream) -> SbiAction {
        if let Some(output) = self.decision {
            return SbiAction::Stop(output);
        }
        if self.budget == 0 || self.current_batch > self.batch_count {
            return SbiAction::Stop(0);
        }
        self.pending_bits
            .copy_from_slice(advice.batch(self.current_batch));
        self.has_pending = true;
        SbiAction::Pull(self.current_batch)
    }

    fn observe(&mut self, batch: u32, obs: SbiObservation) {
        assert!(self.has_pending, "observation without a pending pull");
        debug_assert_eq!(batch, self.current_batch);
        self.has_pending = false;
        let c = obs.correct_bit();
        for (count, &bit) in self.counts.iter_mut().zip(&self.pending_bits) {
            *count += u64::from(bit == c);
        }
        self.pulls_in_batch += 1;
        if self.pulls_in_batch == self.budget {
            let best = self.counts.iter().copied().max().unwrap_or(0);
            if best as f64 >= self.threshold {
                self.decision = Some(self.current_batch);
            } else {
                self.current_batch += 1;
                self.pulls_in_batch = 0;
                self.counts.fill(0);
            }
        }
    }
}
