//! Exponential weights over experts with bandit feedback.
//!
//! Maintains one weight per expert. Each round the weights induce an arm
//! distribution (weight mass flows to each expert's advised arm, mixed with
//! `γ` of uniform exploration); after the pull, the revealed loss is
//! importance-weighted by the pulled arm's probability and charged to every
//! expert that advised that arm. Weights are renormalized to sum `N` after
//! each update so long horizons cannot underflow them.

use crate::adversary::AdviceState;
use crate::config::{ArmId, ExpertId, GameConfig};
use crate::learners::{Learner, LearnerError};
use crate::rng::RngStream;

/// Probabilities below this are treated as a numerical fault rather than
/// divided by.
const PROB_GUARD: f64 = 1e-12;

pub struct Exp4 {
    cfg: GameConfig,
    eta: f64,
    gamma: f64,
    weights: Vec<f64>,
    probs: Vec<f64>,
    updates: u64,
}

impl Exp4 {
    pub fn new(cfg: &GameConfig, eta: f64, gamma: f64) -> Self {
        assert!(eta >= 0.0 && (0.0..=1.0).contains(&gamma));
        Exp4 {
            cfg: *cfg,
            eta,
            gamma,
            weights: vec![1.0; cfg.expert_count as usize],
            probs: vec![0.0; cfg.arm_count as usize],
            updates: 0,
        }
    }

    /// Rates tuned to the configured horizon: `η = √(2·ln N / (T·K))`,
    /// `γ = min(1, √(K·ln N / T))`.
    pub fn with_auto_rates(cfg: &GameConfig) -> Self {
        Self::new(cfg, Self::auto_eta(cfg), Self::auto_gamma(cfg))
    }

    pub fn auto_eta(cfg: &GameConfig) -> f64 {
        assert!(cfg.horizon >= 1);
        let n = f64::from(cfg.expert_count);
        (2.0 * n.ln() / (cfg.horizon as f64 * f64::from(cfg.arm_count))).sqrt()
    }

    pub fn auto_gamma(cfg: &GameConfig) -> f64 {
        assert!(cfg.horizon >= 1);
        let n = f64::from(cfg.expert_count);
        (f64::from(cfg.arm_count) * n.ln() / cfg.horizon as f64)
            .sqrt()
            .min(1.0)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Arm an expert currently points at: group experts follow their advice
    /// bit, expert 0 and padded experts stay on arm 0.
    fn advised_arm(&self, expert_index: usize, advice: &AdviceState) -> ArmId {
        match self.cfg.expert_at(expert_index) {
            ExpertId::Zero | ExpertId::Padded(_) => ArmId::Zero,
            ExpertId::Pair { batch, index } => ArmId::Pair {
                batch,
                side: advice.advised_side(batch, index),
            },
        }
    }

    fn fill_probs(&mut self, advice: &AdviceState) {
        self.probs.fill(0.0);
        let mut total = 0.0;
        for j in 0..self.weights.len() {
            let arm = self.advised_arm(j, advice);
            self.probs[self.cfg.arm_index(arm)] += self.weights[j];
            total += self.weights[j];
        }
        let k = f64::from(self.cfg.arm_count);
        for p in &mut self.probs {
            *p = (1.0 - self.gamma) * (*p / total) + self.gamma / k;
        }
    }

    /// The arm distribution this advice table induces (diagnostic; `choose`
    /// samples from exactly this).
    pub fn arm_distribution(&mut self, advice: &AdviceState) -> Vec<f64> {
        self.fill_probs(advice);
        self.probs.clone()
    }

    #[cfg(test)]
    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }
}

impl Learner for Exp4 {
    fn choose(&mut self, advice: &AdviceState, rng: &mut RngStream) -> ArmId {
        self.fill_probs(advice);
        let u = rng.f64();
        let mut cum = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            cum += p;
            if u < cum {
                return self.cfg.arm_at(i);
            }
        }
        self.cfg.arm_at(self.cfg.arm_count as usize - 1)
    }

    fn observe(
        &mut self,
        advice: &AdviceState,
        pulled: ArmId,
        loss: u8,
    ) -> Result<(), LearnerError> {
        self.updates += 1;
        if loss == 0 {
            // Every importance-weighted estimate is zero: weights unchanged.
            return Ok(());
        }
        self.fill_probs(advice);
        let p = self.probs[self.cfg.arm_index(pulled)];
        if p < PROB_GUARD {
            return Err(LearnerError::NumericalFault {
                prob: p,
                guard: PROB_GUARD,
                update: self.updates,
            });
        }
        let factor = (-self.eta * f64::from(loss) / p).exp();
        for j in 0..self.weights.len() {
            if self.advised_arm(j, advice) == pulled {
                self.weights[j] *= factor;
            }
        }
        let total: f64 = self.weights.iter().sum();
        let scale = f64::from(self.cfg.expert_count) / total;
        for w in &mut self.weights {
            *w *= scale;
        }
        Ok(())
    }
}
