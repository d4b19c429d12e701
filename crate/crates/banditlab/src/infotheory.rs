//! Exact distributional certificates for the identification game.
//!
//! One pull of a batch reveals the pair `(a, c)`: the batch's `n` advice
//! bits and its correct side. Everything here works with the exact law of
//! that observation — dense probability tables, full-support enumeration of
//! observation sequences, compensated summation — so divergences and
//! distances come out at floating-point accuracy rather than Monte Carlo
//! accuracy, and inequalities certified here are certified numerically, not
//! statistically.
//!
//! The one statistical object of interest: with a special expert `v★`, the
//! `T`-round observation law is `P_{v★}^T`; without one it is `P_0^T`. An
//! identifier's sample complexity is governed by `KL(P̄ ∥ P_0^T)` where `P̄`
//! mixes the `n` special laws uniformly, and that divergence is bounded by
//! `((1+4ε²)^T − 1)/n`, which is what [`kl_bound`] computes and
//! [`kl_grid_row`] certifies cell by cell.

use serde::Serialize;
use thiserror::Error;

use crate::numeric::NeumaierSum;

/// Dense per-round tables are refused above this batch size (2^(n+1) cells).
pub const MAX_PMF_BATCH_SIZE: u32 = 20;
/// Sequence enumerations are refused above 2^24 outcomes.
pub const MAX_SEQUENCE_BITS: u32 = 24;
/// Match-count enumeration guard: (T+1)^n states.
pub const MAX_MATCH_COUNT_BATCH: u32 = 4;
pub const MAX_MATCH_COUNT_ROUNDS: u32 = 12;

#[derive(Debug, Error, PartialEq)]
pub enum InfoError {
    #[error("batch size {batch_size} outside 1..={max}", max = MAX_PMF_BATCH_SIZE)]
    BatchSizeOutOfRange { batch_size: u32 },
    #[error("epsilon={epsilon} outside [0, 0.5]: observation probabilities would leave [0,1]")]
    EpsilonOutOfRange { epsilon: f64 },
    #[error("special expert {index} outside 1..={batch_size}")]
    SpecialOutOfRange { index: u32, batch_size: u32 },
    #[error("sequence space needs {bits} bits, above the 2^{max} cap", max = MAX_SEQUENCE_BITS)]
    SequenceSpaceTooLarge { bits: u32 },
    #[error("distributions live on different outcome spaces ({left} vs {right} bits)")]
    MismatchedSupports { left: u32, right: u32 },
    #[error(
        "match-count enumeration capped at n ≤ {max_n}, T ≤ {max_t}; got n={batch_size}, T={rounds}",
        max_n = MAX_MATCH_COUNT_BATCH,
        max_t = MAX_MATCH_COUNT_ROUNDS
    )]
    MatchCountTooLarge { batch_size: u32, rounds: u32 },
    #[error("identification thresholds need n > 10, got n={batch_size}")]
    ThresholdNeedsLargerBatch { batch_size: u32 },
}

/// Exact law of one observation `(a, c)`. Outcome index: `(a << 1) | c`,
/// where bit `v-1` of `a` is expert `v`'s advice.
#[derive(Debug, Clone)]
pub struct RoundPmf {
    batch_size: u32,
    epsilon: f64,
    special: Option<u32>,
    probs: Vec<f64>,
}

impl RoundPmf {
    /// `special = None` gives the null law (`c` a fair coin independent of
    /// `a`); `special = Some(v)` makes `c` equal expert `v`'s bit with
    /// probability `1/2 + ε`. `a` is uniform on `{0,1}^n` either way.
    pub fn new(batch_size: u32, epsilon: f64, special: Option<u32>) -> Result<Self, InfoError> {
        if batch_size == 0 || batch_size > MAX_PMF_BATCH_SIZE {
            return Err(InfoError::BatchSizeOutOfRange { batch_size });
        }
        if !(0.0..=0.5).contains(&epsilon) {
            return Err(InfoError::EpsilonOutOfRange { epsilon });
        }
        if let Some(v) = special {
            if !(1..=batch_size).contains(&v) {
                return Err(InfoError::SpecialOutOfRange {
                    index: v,
                    batch_size,
                });
            }
        }
        let outcomes = 1usize << (batch_size + 1);
        let advice_mass = 0.5f64.powi(batch_size as i32);
        let mut probs = vec![0.0; outcomes];
        for (idx, p) in probs.iter_mut().enumerate() {
            let a = idx >> 1;
            let c = (idx & 1) as u8;
            let c_given_a = match special {
                None => 0.5,
                Some(v) => {
                    let advised = ((a >> (v - 1)) & 1) as u8;
                    if c == advised {
                        0.5 + epsilon
                    } else {
                        0.5 - epsilon
                    }
                }
            };
            *p = advice_mass * c_given_a;
        }
        Ok(RoundPmf {
            batch_size,
            epsilon,
            special,
            probs,
        })
    }

    pub fn batch_size(&self) -> u32 {
        self.batch_size
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn special(&self) -> Option<u32> {
        self.special
    }

    pub fn outcome_count(&self) -> usize {
        self.probs.len()
    }

    #[inline]
    pub fn prob(&self, outcome: usize) -> f64 {
        self.probs[outcome]
    }

    /// Bits of one outcome index: (advice integer, correct side).
    pub fn split_outcome(outcome: usize) -> (usize, u8) {
        (outcome >> 1, (outcome & 1) as u8)
    }
}

/// Which law a sequence distribution follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// `base^T` for a single round law.
    Product,
    /// Uniform mixture over expert identities of `P_v^T`.
    MixtureOverExperts,
}

/// Law of `T` consecutive observations from one batch. Sequences are indexed
/// by packing round outcomes little-endian, `(n+1)` bits per round.
#[derive(Debug, Clone)]
pub struct SequenceDist {
    rounds: u32,
    kind: SequenceKind,
    components: Vec<RoundPmf>,
}

impl SequenceDist {
    fn check_bits(batch_size: u32, rounds: u32) -> Result<u32, InfoError> {
        let bits = (batch_size + 1) * rounds;
        if rounds == 0 || bits > MAX_SEQUENCE_BITS {
            return Err(InfoError::SequenceSpaceTooLarge { bits });
        }
        Ok(bits)
    }

    pub fn product(base: RoundPmf, rounds: u32) -> Result<Self, InfoError> {
        Self::check_bits(base.batch_size(), rounds)?;
        Ok(SequenceDist {
            rounds,
            kind: SequenceKind::Product,
            components: vec![base],
        })
    }

    /// `P̄ = (1/n) Σ_v P_v^T`.
    pub fn mixture_over_experts(
        batch_size: u32,
        epsilon: f64,
        rounds: u32,
    ) -> Result<Self, InfoError> {
        Self::check_bits(batch_size, rounds)?;
        let components = (1..=batch_size)
            .map(|v| RoundPmf::new(batch_size, epsilon, Some(v)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SequenceDist {
            rounds,
            kind: SequenceKind::MixtureOverExperts,
            components,
        })
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn batch_size(&self) -> u32 {
        self.components[0].batch_size()
    }

    fn sequence_bits(&self) -> u32 {
        (self.batch_size() + 1) * self.rounds
    }

    pub fn sequence_count(&self) -> u64 {
        1u64 << self.sequence_bits()
    }

    /// Probability of one packed sequence.
    pub fn mass(&self, sequence: u64) -> f64 {
        let round_bits = self.batch_size() + 1;
        let mask = (1u64 << round_bits) - 1;
        match self.kind {
            SequenceKind::Product => {
                let pmf = &self.components[0];
                let mut p = 1.0;
                for t in 0..self.rounds {
                    p *= pmf.prob(((sequence >> (t * round_bits)) & mask) as usize);
                }
                p
            }
            SequenceKind::MixtureOverExperts => {
                let mut sum = 0.0;
                for pmf in &self.components {
                    let mut p = 1.0;
                    for t in 0..self.rounds {
                        p *= pmf.prob(((sequence >> (t * round_bits)) & mask) as usize);
                    }
                    sum += p;
                }
                sum / self.components.len() as f64
            }
        }
    }
}

fn check_same_support(p: &SequenceDist, q: &SequenceDist) -> Result<(), InfoError> {
    if p.sequence_bits() != q.sequence_bits() {
        return Err(InfoError::MismatchedSupports {
            left: p.sequence_bits(),
            right: q.sequence_bits(),
        });
    }
    Ok(())
}

/// `KL(P ∥ Q)` by full enumeration, with `0·ln(0/q) = 0`. Returns `+∞` if
/// `P` puts mass where `Q` does not.
pub fn kl_divergence(p: &SequenceDist, q: &SequenceDist) -> Result<f64, InfoError> {
    check_same_support(p, q)?;
    let mut sum = NeumaierSum::new();
    for seq in 0..p.sequence_count() {
        let pp = p.mass(seq);
        if pp == 0.0 {
            continue;
        }
        let qq = q.mass(seq);
        if qq == 0.0 {
            return Ok(f64::INFINITY);
        }
        sum.add(pp * (pp / qq).ln());
    }
    Ok(sum.total())
}

/// Total variation distance by full enumeration.
pub fn total_variation(p: &SequenceDist, q: &SequenceDist) -> Result<f64, InfoError> {
    check_same_support(p, q)?;
    let mut sum = NeumaierSum::new();
    for seq in 0..p.sequence_count() {
        sum.add((p.mass(seq) - q.mass(seq)).abs());
    }
    Ok(0.5 * sum.total())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PinskerReport {
    pub kl: f64,
    pub tv: f64,
    /// `√(KL/2)`.
    pub pinsker_rhs: f64,
    pub holds: bool,
}

/// Checks `TV(P,Q) ≤ √(KL(P∥Q)/2)` on the actual distributions.
pub fn pinsker_check(p: &SequenceDist, q: &SequenceDist) -> Result<PinskerReport, InfoError> {
    let kl = kl_divergence(p, q)?;
    let tv = total_variation(p, q)?;
    let pinsker_rhs = (kl / 2.0).sqrt();
    Ok(PinskerReport {
        kl,
        tv,
        pinsker_rhs,
        holds: tv <= pinsker_rhs,
    })
}

/// `KL(P̄ ∥ P_0^T)` by exact sequence enumeration: the divergence an
/// identifier pulling one batch `T` times must pay to separate "some expert
/// here is special" from "none is".
pub fn exact_kl_mixture_vs_null(
    batch_size: u32,
    epsilon: f64,
    rounds: u32,
) -> Result<f64, InfoError> {
    let mixture = SequenceDist::mixture_over_experts(batch_size, epsilon, rounds)?;
    let null = SequenceDist::product(RoundPmf::new(batch_size, epsilon, None)?, rounds)?;
    kl_divergence(&mixture, &null)
}

/// Same divergence through the match-count sufficient statistic.
///
/// The likelihood ratio of `P_v^T` against the null depends on the sequence
/// only through `M_v`, the number of rounds where expert `v`'s bit equals
/// the correct side, and under the null the `M_v` are independent
/// `Bin(T, 1/2)`. So `KL(P̄ ∥ P_0^T) = E_0[R ln R]` with
/// `R = (1/n) Σ_v (1+2ε)^{M_v} (1−2ε)^{T−M_v}`, which this enumerates over
/// `{0..T}^n`. Entirely disjoint code path from the sequence enumeration —
/// that is the point.
pub fn match_count_kl(batch_size: u32, epsilon: f64, rounds: u32) -> Result<f64, InfoError> {
    if batch_size == 0 || batch_size > MAX_MATCH_COUNT_BATCH || rounds > MAX_MATCH_COUNT_ROUNDS {
        return Err(InfoError::MatchCountTooLarge {
            batch_size,
            rounds,
        });
    }
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(InfoError::EpsilonOutOfRange { epsilon });
    }
    let t = rounds as usize;
    let n = batch_size as usize;

    // Bin(T, 1/2) pmf: C(T, m) / 2^T, exact in f64 at these sizes.
    let mut binom = vec![0f64; t + 1];
    binom[0] = 1.0;
    for _ in 0..t {
        for m in (1..=t).rev() {
            binom[m] += binom[m - 1];
        }
    }
    let half_pow = 0.5f64.powi(rounds as i32);
    for b in &mut binom {
        *b *= half_pow;
    }

    // Likelihood-ratio factor per match count.
    let up = 1.0 + 2.0 * epsilon;
    let down = 1.0 - 2.0 * epsilon;
    let factor: Vec<f64> = (0..=t)
        .map(|m| up.powi(m as i32) * down.powi((t - m) as i32))
        .collect();

    let mut counts = vec![0usize; n];
    let mut sum = NeumaierSum::new();
    loop {
        let mut weight = 1.0;
        let mut ratio_acc = 0.0;
        for &m in &counts {
            weight *= binom[m];
            ratio_acc += factor[m];
        }
        let r = ratio_acc / n as f64;
        if r > 0.0 {
            sum.add(weight * r * r.ln());
        }
        // Odometer over {0..T}^n.
        let mut digit = 0;
        loop {
            if digit == n {
                return Ok(sum.total());
            }
            counts[digit] += 1;
            if counts[digit] <= t {
                break;
            }
            counts[digit] = 0;
            digit += 1;
        }
    }
}

/// Closed-form ceiling `((1+4ε²)^T − 1)/n` on `KL(P̄ ∥ P_0^T)`, evaluated
/// stably via `expm1`/`ln_1p`.
pub fn kl_bound(batch_size: u32, epsilon: f64, rounds: u32) -> Result<f64, InfoError> {
    if batch_size == 0 {
        return Err(InfoError::BatchSizeOutOfRange { batch_size });
    }
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(InfoError::EpsilonOutOfRange { epsilon });
    }
    let growth = f64::from(rounds) * (4.0 * epsilon * epsilon).ln_1p();
    Ok(growth.exp_m1() / f64::from(batch_size))
}

/// `d(p ∥ q)` for Bernoulli laws, `0·ln 0 = 0`.
pub fn bernoulli_kl(p: f64, q: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p) && q > 0.0 && q < 1.0);
    let mut kl = 0.0;
    if p > 0.0 {
        kl += p * (p / q).ln();
    }
    if p < 1.0 {
        kl += (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln();
    }
    kl
}

/// Mean of the likelihood ratio `dP_{ratio_expert}^T / dP_0^T` under the
/// product measure selected by `under` (`None` = the null), by exact
/// enumeration.
pub fn likelihood_ratio_mean(
    batch_size: u32,
    epsilon: f64,
    rounds: u32,
    ratio_expert: u32,
    under: Option<u32>,
) -> Result<f64, InfoError> {
    let ratio = SequenceDist::product(
        RoundPmf::new(batch_size, epsilon, Some(ratio_expert))?,
        rounds,
    )?;
    let null = SequenceDist::product(RoundPmf::new(batch_size, epsilon, None)?, rounds)?;
    let measure = SequenceDist::product(RoundPmf::new(batch_size, epsilon, under)?, rounds)?;
    let mut sum = NeumaierSum::new();
    for seq in 0..null.sequence_count() {
        let w = measure.mass(seq);
        if w == 0.0 {
            continue;
        }
        sum.add(w * ratio.mass(seq) / null.mass(seq));
    }
    Ok(sum.total())
}

/// Round-count thresholds below which no identifier can be good.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RoundThresholds {
    /// `ln(n/10)/(4ε²)`: floor for the one-batch identification game.
    pub one_batch_floor: f64,
    /// Half of it: the per-batch share an embedded identifier can spend.
    pub embedded_share: f64,
    /// `k·ln(n/10)/(20ε²)` when `k` is given: floor for the full game.
    pub full_game_floor: Option<f64>,
}

/// Computes the thresholds; rejects `n ≤ 10` outright (the logarithm would
/// be non-positive and every downstream formula meaningless).
pub fn min_rounds_threshold(
    batch_size: u32,
    epsilon: f64,
    batch_count: Option<u32>,
) -> Result<RoundThresholds, InfoError> {
    if batch_size <= 10 {
        return Err(InfoError::ThresholdNeedsLargerBatch { batch_size });
    }
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(InfoError::EpsilonOutOfRange { epsilon });
    }
    let log_term = (f64::from(batch_size) / 10.0).ln();
    let one_batch_floor = log_term / (4.0 * epsilon * epsilon);
    Ok(RoundThresholds {
        one_batch_floor,
        embedded_share: one_batch_floor / 2.0,
        full_game_floor: batch_count
            .map(|k| f64::from(k) * log_term / (20.0 * epsilon * epsilon)),
    })
}

/// One certified cell of the divergence grid.
#[derive(Debug, Clone, Serialize)]
pub struct KlGridRow {
    pub batch_size: u32,
    pub rounds: u32,
    pub epsilon: f64,
    pub exact_kl: f64,
    pub bound: f64,
    pub tv: f64,
    pub pinsker_rhs: f64,
    pub pass: bool,
}

/// Computes everything for one `(n, T, ε)` cell: exact divergence, its
/// closed-form ceiling, total variation, and the Pinsker comparison. `pass`
/// requires both `exact_kl ≤ bound` and the Pinsker inequality.
pub fn kl_grid_row(batch_size: u32, epsilon: f64, rounds: u32) -> Result<KlGridRow, InfoError> {
    let mixture = SequenceDist::mixture_over_experts(batch_size, epsilon, rounds)?;
    let null = SequenceDist::product(RoundPmf::new(batch_size, epsilon, None)?, rounds)?;
    let report = pinsker_check(&mixture, &null)?;
    let bound = kl_bound(batch_size, epsilon, rounds)?;
    Ok(KlGridRow {
        batch_size,
        rounds,
        epsilon,
        exact_kl: report.kl,
        bound,
        tv: report.tv,
        pinsker_rhs: report.pinsker_rhs,
        pass: report.kl <= bound && report.holds,
    })
}
