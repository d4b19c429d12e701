//! Simulation and verification framework for the bandit-with-expert-advice
//! lower-bound construction.
//!
//! The crate has three layers:
//!
//! * a game layer ([`config`], [`adversary`], [`learners`]) that plays the
//!   adaptive batched environment against arbitrary learners,
//! * an identification layer ([`sbi`]) for the simplified
//!   special-batch-identification game and the reductions between the two,
//! * an analysis layer ([`infotheory`], [`harness`]) with exact
//!   information-theoretic certificates and a Monte Carlo experiment harness.
//!
//! Everything downstream of a `(seed, config)` pair is deterministic,
//! including the parallel harness paths.

pub mod adversary;
pub mod cli;
pub mod config;
pub mod exec;
pub mod harness;
pub mod infotheory;
pub mod learners;
pub mod numeric;
pub mod rng;
pub mod sbi;
