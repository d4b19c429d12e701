//! Game identifiers, dimension derivation, and configuration validation.
//!
//! The environment is played on a *reduced* instance: arms come in `k`
//! batches of two plus a safe arm `0`, experts come in `k` groups of `n` plus
//! the always-safe expert `0`. A raw `(K, N)` pair maps onto the largest
//! reduced instance that fits; leftover arms incur constant loss 1 and
//! leftover experts always advise arm 0, so they are never useful and only
//! exist to make the dimensions exact.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arm in the reduced game. `Pair { batch, side }` is arm `side ∈ {0,1}` of
/// batch `batch ∈ 1..=k`; `Padded` arms always suffer loss 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArmId {
    Zero,
    Pair { batch: u32, side: u8 },
    Padded(u32),
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArmId::Zero => write!(f, "0"),
            ArmId::Pair { batch, side } => write!(f, "({batch},{side})"),
            ArmId::Padded(i) => write!(f, "pad{i}"),
        }
    }
}

// JSON forms: "0" for the safe arm, {"u": batch, "side": side} for pair
// arms, "pad<i>" for padded arms.
impl Serialize for ArmId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ArmId::Zero => serializer.serialize_str("0"),
            ArmId::Pair { batch, side } => {
                use serde::ser::SerializeStruct;
                let mut s = serializer.serialize_struct("ArmId", 2)?;
                s.serialize_field("u", batch)?;
                s.serialize_field("side", side)?;
                s.end()
            }
            ArmId::Padded(i) => serializer.serialize_str(&format!("pad{i}")),
        }
    }
}

impl<'de> Deserialize<'de> for ArmId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Pair { u: u32, side: u8 },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Name(s) if s == "0" => Ok(ArmId::Zero),
            Repr::Name(s) => match s.strip_prefix("pad").and_then(|r| r.parse::<u32>().ok()) {
                Some(i) => Ok(ArmId::Padded(i)),
                None => Err(serde::de::Error::custom(format!(
                    "unknown arm {s:?}; expected \"0\", \"pad<i>\", or {{\"u\":…,\"side\":…}}"
                ))),
            },
            Repr::Pair { u, side } if side <= 1 => Ok(ArmId::Pair { batch: u, side }),
            Repr::Pair { side, .. } => Err(serde::de::Error::custom(format!(
                "arm side {side} must be 0 or 1"
            ))),
        }
    }
}

/// Expert in the reduced game. `Pair { batch, index }` is expert
/// `index ∈ 1..=n` of batch `batch ∈ 1..=k`; `Padded` experts always advise
/// arm 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpertId {
    Zero,
    Pair { batch: u32, index: u32 },
    Padded(u32),
}

impl fmt::Display for ExpertId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpertId::Zero => write!(f, "0"),
            ExpertId::Pair { batch, index } => write!(f, "({batch},{index})"),
            ExpertId::Padded(i) => write!(f, "pad{i}"),
        }
    }
}

// JSON forms mirror arms: "0", {"u": batch, "v": index}, "pad<i>".
impl Serialize for ExpertId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExpertId::Zero => serializer.serialize_str("0"),
            ExpertId::Pair { batch, index } => {
                use serde::ser::SerializeStruct;
                let mut s = serializer.serialize_struct("ExpertId", 2)?;
                s.serialize_field("u", batch)?;
                s.serialize_field("v", index)?;
                s.end()
            }
            ExpertId::Padded(i) => serializer.serialize_str(&format!("pad{i}")),
        }
    }
}

impl<'de> Deserialize<'de> for ExpertId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Pair { u: u32, v: u32 },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Name(s) if s == "0" => Ok(ExpertId::Zero),
            Repr::Name(s) => match s.strip_prefix("pad").and_then(|r| r.parse::<u32>().ok()) {
                Some(i) => Ok(ExpertId::Padded(i)),
                None => Err(serde::de::Error::custom(format!(
                    "unknown expert {s:?}; expected \"0\", \"pad<i>\", or {{\"u\":…,\"v\":…}}"
                ))),
            },
            Repr::Pair { u, v } => Ok(ExpertId::Pair { batch: u, index: v }),
        }
    }
}

/// Loss-generation strategy: the null environment, or the environment where
/// expert `index` of batch `batch` gives informative advice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyId {
    Null,
    Special { batch: u32, index: u32 },
}

impl StrategyId {
    /// Batch holding the informative expert, or 0 under the null strategy.
    pub fn special_batch(&self) -> u32 {
        match self {
            StrategyId::Null => 0,
            StrategyId::Special { batch, .. } => *batch,
        }
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyId::Null => write!(f, "S0"),
            StrategyId::Special { batch, index } => write!(f, "S({batch},{index})"),
        }
    }
}

impl std::str::FromStr for StrategyId {
    type Err = ConfigError;

    /// Parses the display form: `S0` or `S(u,v)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "S0" {
            return Ok(StrategyId::Null);
        }
        let parse = || {
            let inner = s.strip_prefix("S(")?.strip_suffix(')')?;
            let (u, v) = inner.split_once(',')?;
            Some(StrategyId::Special {
                batch: u.trim().parse().ok()?,
                index: v.trim().parse().ok()?,
            })
        };
        parse().ok_or_else(|| ConfigError::StrategyParse(s.to_string()))
    }
}

// JSON forms: "S0" for the null strategy, {"u": batch, "v": index} otherwise.
impl Serialize for StrategyId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            StrategyId::Null => serializer.serialize_str("S0"),
            StrategyId::Special { batch, index } => {
                use serde::ser::SerializeStruct;
                let mut s = serializer.serialize_struct("StrategyId", 2)?;
                s.serialize_field("u", batch)?;
                s.serialize_field("v", index)?;
                s.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for StrategyId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Pair { u: u32, v: u32 },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Name(s) if s == "S0" => Ok(StrategyId::Null),
            Repr::Name(s) => Err(serde::de::Error::custom(format!(
                "unknown strategy name {s:?}; expected \"S0\" or {{\"u\":…,\"v\":…}}"
            ))),
            Repr::Pair { u, v } => Ok(StrategyId::Special { batch: u, index: v }),
        }
    }
}

/// Arms and experts appended to make raw `(K, N)` dimensions exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PaddingPlan {
    pub arms: u32,
    pub experts: u32,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("K={0} cannot host a batch: need K ≥ 3")]
    ArmCountTooSmall(u32),
    #[error("N={expert_count} leaves no room for k={batch_count} expert groups: need N ≥ k+1")]
    ExpertCountTooSmall { expert_count: u32, batch_count: u32 },
    #[error("strategy {strategy} outside instance with k={batch_count}, n={batch_size}")]
    StrategyOutOfRange {
        strategy: String,
        batch_count: u32,
        batch_size: u32,
    },
    #[error("cannot parse strategy {0:?}: expected \"S0\" or \"S(u,v)\"")]
    StrategyParse(String),
}

/// Largest reduced dimensions fitting inside raw `(K, N)`:
/// the largest `k` with `2k+1 ≤ K`, then the largest `n` with `kn+1 ≤ N`.
/// Whatever is left over is returned as the padding plan.
pub fn derive_reduced_dims(
    arm_count: u32,
    expert_count: u32,
) -> Result<(u32, u32, PaddingPlan), ConfigError> {
    if arm_count < 3 {
        return Err(ConfigError::ArmCountTooSmall(arm_count));
    }
    let k = (arm_count - 1) / 2;
    if expert_count < k + 1 {
        return Err(ConfigError::ExpertCountTooSmall {
            expert_count,
            batch_count: k,
        });
    }
    let n = (expert_count - 1) / k;
    let padding = PaddingPlan {
        arms: arm_count - (2 * k + 1),
        experts: expert_count - (k * n + 1),
    };
    Ok((k, n, padding))
}

/// Fully derived game instance. `arm_count`/`expert_count` are the raw
/// dimensions; `batch_count`/`batch_size` the reduced ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub arm_count: u32,
    pub expert_count: u32,
    pub horizon: u64,
    pub epsilon: f64,
    pub batch_count: u32,
    pub batch_size: u32,
    pub seed: u64,
    pub padding: PaddingPlan,
}

impl GameConfig {
    pub fn new(
        arm_count: u32,
        expert_count: u32,
        horizon: u64,
        epsilon: f64,
        seed: u64,
    ) -> Result<Self, ConfigError> {
        let (batch_count, batch_size, padding) = derive_reduced_dims(arm_count, expert_count)?;
        Ok(GameConfig {
            arm_count,
            expert_count,
            horizon,
            epsilon,
            batch_count,
            batch_size,
            seed,
            padding,
        })
    }

    /// Instance specified directly by reduced dimensions; no padding.
    pub fn from_reduced(
        batch_count: u32,
        batch_size: u32,
        horizon: u64,
        epsilon: f64,
        seed: u64,
    ) -> Self {
        GameConfig {
            arm_count: 2 * batch_count + 1,
            expert_count: batch_count * batch_size + 1,
            horizon,
            epsilon,
            batch_count,
            batch_size,
            seed,
            padding: PaddingPlan::default(),
        }
    }

    /// Dense arm index: 0, then batch pairs in batch order (side 0 before
    /// side 1), then padded arms.
    pub fn arm_index(&self, arm: ArmId) -> usize {
        match arm {
            ArmId::Zero => 0,
            ArmId::Pair { batch, side } => 1 + 2 * (batch as usize - 1) + side as usize,
            ArmId::Padded(i) => 2 * self.batch_count as usize + 1 + i as usize,
        }
    }

    /// Inverse of [`arm_index`](Self::arm_index).
    pub fn arm_at(&self, index: usize) -> ArmId {
        let paired = 2 * self.batch_count as usize;
        if index == 0 {
            ArmId::Zero
        } else if index <= paired {
            ArmId::Pair {
                batch: ((index - 1) / 2 + 1) as u32,
                side: ((index - 1) % 2) as u8,
            }
        } else {
            ArmId::Padded((index - paired - 1) as u32)
        }
    }

    /// Dense expert index: 0, then batch groups in batch order, then padded
    /// experts.
    pub fn expert_index(&self, expert: ExpertId) -> usize {
        let n = self.batch_size as usize;
        match expert {
            ExpertId::Zero => 0,
            ExpertId::Pair { batch, index } => 1 + (batch as usize - 1) * n + (index as usize - 1),
            ExpertId::Padded(i) => self.batch_count as usize * n + 1 + i as usize,
        }
    }

    /// Inverse of [`expert_index`](Self::expert_index).
    pub fn expert_at(&self, index: usize) -> ExpertId {
        let n = self.batch_size as usize;
        let grouped = self.batch_count as usize * n;
        if index == 0 {
            ExpertId::Zero
        } else if index <= grouped {
            ExpertId::Pair {
                batch: ((index - 1) / n + 1) as u32,
                index: ((index - 1) % n + 1) as u32,
            }
        } else {
            ExpertId::Padded((index - grouped - 1) as u32)
        }
    }

    pub fn contains_arm(&self, arm: ArmId) -> bool {
        match arm {
            ArmId::Zero => true,
            ArmId::Pair { batch, side } => {
                (1..=self.batch_count).contains(&batch) && side <= 1
            }
            ArmId::Padded(i) => i < self.padding.arms,
        }
    }

    pub fn contains_expert(&self, expert: ExpertId) -> bool {
        match expert {
            ExpertId::Zero => true,
            ExpertId::Pair { batch, index } => {
                (1..=self.batch_count).contains(&batch) && (1..=self.batch_size).contains(&index)
            }
            ExpertId::Padded(i) => i < self.padding.experts,
        }
    }

    pub fn validate_strategy(&self, strategy: StrategyId) -> Result<(), ConfigError> {
        match strategy {
            StrategyId::Null => Ok(()),
            StrategyId::Special { batch, index } => {
                if (1..=self.batch_count).contains(&batch)
                    && (1..=self.batch_size).contains(&index)
                {
                    Ok(())
                } else {
                    Err(ConfigError::StrategyOutOfRange {
                        strategy: strategy.to_string(),
                        batch_count: self.batch_count,
                        batch_size: self.batch_size,
                    })
                }
            }
        }
    }

    pub fn all_arms(&self) -> impl Iterator<Item = ArmId> + '_ {
        (0..self.arm_count as usize).map(|i| self.arm_at(i))
    }

    pub fn all_experts(&self) -> impl Iterator<Item = ExpertId> + '_ {
        (0..self.expert_count as usize).map(|i| self.expert_at(i))
    }
}

/// Outcome of [`validate_config`]: hard violations (each naming the broken
/// constraint) and soft warnings about statistically degenerate regimes.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_config(cfg: &GameConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    let v = &mut report.violations;

    if !(cfg.epsilon > 0.0 && cfg.epsilon <= 0.1) {
        v.push(format!("epsilon={} outside (0, 0.1]", cfg.epsilon));
    }
    if cfg.horizon < 1 {
        v.push("T=0: horizon must be ≥ 1".into());
    }
    if cfg.batch_count < 1 {
        v.push("k=0: need at least one batch".into());
    }
    if cfg.batch_size < 1 {
        v.push("n=0: need at least one expert per batch".into());
    }
    let arms_needed = 2 * cfg.batch_count + 1 + cfg.padding.arms;
    if cfg.arm_count != arms_needed {
        v.push(format!(
            "K={} but 2k+1+padded arms = {}",
            cfg.arm_count, arms_needed
        ));
    }
    let experts_needed = cfg.batch_count * cfg.batch_size + 1 + cfg.padding.experts;
    if cfg.expert_count != experts_needed {
        v.push(format!(
            "N={} but kn+1+padded experts = {}",
            cfg.expert_count, experts_needed
        ));
    }

    if cfg.batch_size <= 10 {
        report
            .warnings
            .push(format!("n={} not > 10", cfg.batch_size));
    }
    let t_floor =
        f64::from(cfg.arm_count) * (f64::from(cfg.expert_count) / f64::from(cfg.arm_count)).ln();
    if (cfg.horizon as f64) < t_floor {
        report.warnings.push(format!(
            "T={} below K·ln(N/K) ≈ {t_floor:.1}; regret guarantees are vacuous",
            cfg.horizon
        ));
    }

    report
}

/// On-disk single-game document (used by `simulate` and the identification
/// subcommands).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameConfigDoc {
    #[serde(rename = "K")]
    pub arm_count: u32,
    #[serde(rename = "N")]
    pub expert_count: u32,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub strategy: StrategyId,
}

impl GameConfigDoc {
    pub fn into_game(self) -> Result<(GameConfig, StrategyId), ConfigError> {
        let cfg = GameConfig::new(
            self.arm_count,
            self.expert_count,
            self.horizon,
            self.epsilon,
            self.seed,
        )?;
        cfg.validate_strategy(self.strategy)?;
        Ok((cfg, self.strategy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_instance_has_no_padding() {
        let (k, n, pad) = derive_reduced_dims(5, 41).unwrap();
        assert_eq!((k, n), (2, 20));
        assert_eq!(pad, PaddingPlan::default());
    }

    #[test]
    fn even_arm_count_pads_one_arm() {
        let (k, n, pad) = derive_reduced_dims(4, 13).unwrap();
        assert_eq!(k, 1);
        // Largest n with kn+1 ≤ 13.
        assert_eq!(n, 12);
        assert_eq!(pad, PaddingPlan { arms: 1, experts: 0 });
    }

    #[test]
    fn leftover_experts_are_padded() {
        let (k, n, pad) = derive_reduced_dims(7, 20).unwrap();
        assert_eq!((k, n), (3, 6));
        assert_eq!(pad, PaddingPlan { arms: 0, experts: 1 });
    }

    #[test]
    fn tiny_dimensions_are_rejected() {
        assert_eq!(
            derive_reduced_dims(2, 10).unwrap_err(),
            ConfigError::ArmCountTooSmall(2)
        );
        assert!(matches!(
            derive_reduced_dims(5, 2).unwrap_err(),
            ConfigError::ExpertCountTooSmall { .. }
        ));
    }

    #[test]
    fn indices_are_dense_and_invertible() {
        let cfg = GameConfig::new(8, 30, 100, 0.1, 0).unwrap();
        assert_eq!(cfg.batch_count, 3);
        assert_eq!(cfg.batch_size, 9);
        assert_eq!(cfg.padding, PaddingPlan { arms: 1, experts: 2 });
        for i in 0..cfg.arm_count as usize {
            let arm = cfg.arm_at(i);
            assert!(cfg.contains_arm(arm));
            assert_eq!(cfg.arm_index(arm), i);
        }
        for j in 0..cfg.expert_count as usize {
            let e = cfg.expert_at(j);
            assert!(cfg.contains_expert(e));
            assert_eq!(cfg.expert_index(e), j);
        }
        assert_eq!(cfg.arm_index(ArmId::Pair { batch: 1, side: 1 }), 2);
        assert_eq!(cfg.expert_index(ExpertId::Pair { batch: 2, index: 1 }), 10);
    }

    #[test]
    fn validation_flags_each_broken_constraint() {
        let mut cfg = GameConfig::from_reduced(2, 20, 1000, 0.1, 7);
        assert!(validate_config(&cfg).is_ok());

        cfg.epsilon = 0.0;
        cfg.horizon = 0;
        let report = validate_config(&cfg);
        assert_eq!(report.violations.len(), 2);
        assert!(report.violations[0].contains("epsilon"));
        assert!(report.violations[1].contains("T=0"));
    }

    #[test]
    fn validation_warns_on_small_n_and_short_horizon() {
        let cfg = GameConfig::from_reduced(2, 10, 2, 0.1, 7);
        let report = validate_config(&cfg);
        assert!(report.is_ok());
        assert!(report.warnings.iter().any(|w| w.contains("n=10 not > 10")));
        assert!(report.warnings.iter().any(|w| w.starts_with("T=2 below")));
    }

    #[test]
    fn strategy_validation() {
        let cfg = GameConfig::from_reduced(2, 20, 100, 0.1, 0);
        cfg.validate_strategy(StrategyId::Null).unwrap();
        cfg.validate_strategy(StrategyId::Special { batch: 2, index: 20 })
            .unwrap();
        assert!(cfg
            .validate_strategy(StrategyId::Special { batch: 3, index: 1 })
            .is_err());
        assert!(cfg
            .validate_strategy(StrategyId::Special { batch: 1, index: 21 })
            .is_err());
    }

    #[test]
    fn strategy_json_round_trip() {
        let null: StrategyId = serde_json::from_str("\"S0\"").unwrap();
        assert_eq!(null, StrategyId::Null);
        assert_eq!(serde_json::to_string(&null).unwrap(), "\"S0\"");

        let special: StrategyId = serde_json::from_str(r#"{"u":2,"v":7}"#).unwrap();
        assert_eq!(special, StrategyId::Special { batch: 2, index: 7 });
        assert_eq!(
            serde_json::to_string(&special).unwrap(),
            r#"{"u":2,"v":7}"#
        );

        assert!(serde_json::from_str::<StrategyId>("\"S1\"").is_err());
    }

    #[test]
    fn strategy_from_display_string() {
        assert_eq!("S0".parse::<StrategyId>().unwrap(), StrategyId::Null);
        assert_eq!(
            "S(2,17)".parse::<StrategyId>().unwrap(),
            StrategyId::Special { batch: 2, index: 17 }
        );
        assert!(matches!(
            "S(2)".parse::<StrategyId>(),
            Err(ConfigError::StrategyParse(_))
        ));
        assert!("special".parse::<StrategyId>().is_err());
    }

    #[test]
    fn arm_json_round_trip() {
        for (arm, json) in [
            (ArmId::Zero, "\"0\""),
            (ArmId::Pair { batch: 1, side: 1 }, r#"{"u":1,"side":1}"#),
            (ArmId::Padded(2), "\"pad2\""),
        ] {
            assert_eq!(serde_json::to_string(&arm).unwrap(), json);
            assert_eq!(serde_json::from_str::<ArmId>(json).unwrap(), arm);
        }
        assert!(serde_json::from_str::<ArmId>(r#"{"u":1,"side":2}"#).is_err());
        assert!(serde_json::from_str::<ArmId>("\"arm9\"").is_err());
    }

    #[test]
    fn config_doc_round_trip() {
        let doc: GameConfigDoc = serde_json::from_str(
            r#"{"K":5,"N":41,"T":1000,"epsilon":0.1,"seed":42,"strategy":{"u":1,"v":3}}"#,
        )
        .unwrap();
        let (cfg, strategy) = doc.into_game().unwrap();
        assert_eq!((cfg.batch_count, cfg.batch_size), (2, 20));
        assert_eq!(strategy, StrategyId::Special { batch: 1, index: 3 });
    }

    proptest! {
        #[test]
        fn derived_dims_satisfy_fit_invariants(arm_count in 3u32..200, expert_count in 1u32..4000) {
            prop_assume!(expert_count >= arm_count / 2);
            if let Ok((k, n, pad)) = derive_reduced_dims(arm_count, expert_count) {
                // k maximal for K, n maximal for (k, N), padding exact.
                prop_assert!(2 * k + 1 <= arm_count);
                prop_assert!(2 * (k + 1) + 1 > arm_count);
                prop_assert!(k * n + 1 <= expert_count);
                prop_assert!(k * (n + 1) + 1 > expert_count);
                prop_assert_eq!(2 * k + 1 + pad.arms, arm_count);
                prop_assert_eq!(k * n + 1 + pad.experts, expert_count);
            }
        }

        #[test]
        fn arm_indexing_bijective(arm_count in 3u32..60, expert_count in 10u32..200) {
            if let Ok(cfg) = GameConfig::new(arm_count, expert_count, 10, 0.05, 0) {
                for i in 0..cfg.arm_count as usize {
                    prop_assert_eq!(cfg.arm_index(cfg.arm_at(i)), i);
                }
                for j in 0..cfg.expert_count as usize {
                    prop_assert_eq!(cfg.expert_index(cfg.expert_at(j)), j);
                }
            }
        }
    }
}
