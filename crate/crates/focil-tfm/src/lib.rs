//! Exact-arithmetic model checker for transaction fee mechanisms with
//! multiple proposers and inclusion lists.
//!
//! A committee of `m` includers publishes inclusion lists, then a block
//! producer assembles the block; both sides can be bribed to censor a target
//! transaction and both can plant fakes. This crate implements three fee
//! mechanisms over that game (a double bid, a single split bid, and a single
//! prioritized bid), computes every fee, bribe, and utility in exact rational
//! arithmetic, and verifies the mechanisms' incentive properties at desk
//! scale by exhaustive deviation search:
//!
//! - user truthfulness under no congestion ([`equilibrium::check_dsic`]),
//! - resistance of includers and producer to censorship bribes up to the
//!   closed-form caps ([`equilibrium::check_mcbn`],
//!   [`equilibrium::check_mbbn`]),
//! - structural censorship resistance of the allocation rules
//!   ([`equilibrium::check_censorship_resistance`]),
//! - guaranteed block access for congested-out transactions willing to pay
//!   ([`equilibrium::check_fair_under_congestion`]), and the deliberate
//!   lack of it under the prioritized mechanism
//!   ([`equilibrium::check_single_prioritized_unfair`]),
//! - closed-form predicates versus brute-force equilibria in a simplified
//!   censorship game ([`analysis`]).
//!
//! Everything downstream of a scenario file is deterministic: fixed seeds,
//! ordered maps, and rational arithmetic with no rounding.

pub mod analysis;
pub mod bribery;
pub mod core;
pub mod equilibrium;
pub mod money;
pub mod scenario;
pub mod tfm;
pub mod utilities;

#[cfg(doctest)]
mod book;

use thiserror::Error as ThisError;

pub use crate::core::{
    block_valid, bp_fee, build_l_bp, build_l_cm, cm_fee, fee_total, inclusion_vector, Bid,
    GameState, InclusionVector, ListVariant, Origin, OrderedFeeList, ScenarioParams, Sender,
    SenderVariant, TfmKind, Transaction, TxId,
};
pub use crate::money::Money;

/// Errors reported by the library.
#[derive(Debug, ThisError)]
pub enum Error {
    /// A rational did not parse as `"numerator/denominator"`.
    #[error("cannot parse {0:?} as a rational \"numerator/denominator\"")]
    MoneyParse(String),
    /// Scenario parameters out of range.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// A structurally broken scenario or game state.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    /// A transaction id that no pool contains.
    #[error("unknown transaction id {0}")]
    UnknownTx(core::TxId),
    /// The bribe target sits outside the positions the formulas cover.
    #[error("transaction {0} is outside the reachable list positions: {1}")]
    TargetNotReachable(core::TxId, String),
    /// A bribe type aimed at the wrong party.
    #[error("bribe type {bribe} cannot target the {party}")]
    BribeParty { bribe: String, party: String },
    /// Belief probabilities that do not sum to one.
    #[error("belief probabilities must sum to 1 (got {0})")]
    BadDistribution(money::Money),
    /// An operation a mechanism does not define.
    #[error("{what} is not defined for {mechanism}")]
    UnsupportedMechanism { what: String, mechanism: String },
    /// The scenario generator could not satisfy the regime's preconditions.
    #[error("scenario generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: u32, reason: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
