//! Realized and expected utilities of every party in a final state.
//!
//! Utilities follow the model's cost accounting exactly. When attesters
//! reject an invalid block, all on-chain transfers are undone: fee income
//! and the outflows for a party's own planted transactions are zeroed. Costs
//! that accrue off-chain survive rejection: forfeited bribes, the
//! per-transaction listing cost of includers, and the producer's marginal
//! cost for mempool plants.
//!
//! Expected utilities weight the realized utility over the joint committee
//! types drawn from a belief. With the final state fixed, no party's utility
//! depends on another party's type, so the expectation collapses to the
//! realized value; the machinery exists to verify exactly that
//! belief-irrelevance and to keep the interim-Bayesian definition explicit.

use serde::{Deserialize, Serialize};

use crate::bribery::{bribe_loss, BeliefCm, Party, TypeAssignment};
use crate::core::{block_valid, fee_total, GameState, Origin, ScenarioParams, TxId};
use crate::money::Money;
use crate::tfm::PaymentBreakdown;
use crate::{Error, Result};

/// A party whose utility can be evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameParty {
    User(TxId),
    Includer(u32),
    BlockProducer,
}

/// A realized utility with its exact term breakdown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UtilityReport {
    pub party: GameParty,
    /// Whether attesters approved the block (it satisfied every list).
    pub approved: bool,
    /// Sum of all `terms` amounts, exactly.
    pub total: Money,
    /// `(name, signed amount)` pairs matching the model's summands.
    pub terms: Vec<(&'static str, Money)>,
}

impl UtilityReport {
    fn of(party: GameParty, approved: bool, terms: Vec<(&'static str, Money)>) -> UtilityReport {
        let total = terms.iter().map(|(_, a)| a).sum();
        UtilityReport {
            party,
            approved,
            total,
            terms,
        }
    }
}

/// Utility of the user who sent `t`: value minus every payment when the
/// approved block includes it, zero otherwise.
pub fn user_utility(
    t: TxId,
    state: &GameState,
    payments: &PaymentBreakdown,
    p: &ScenarioParams,
) -> Result<UtilityReport> {
    let tx = state.tx(t)?;
    if tx.origin != Origin::User {
        return Err(Error::InvalidScenario(format!(
            "transaction {t} is not a user's"
        )));
    }
    let value = tx.value.clone().ok_or_else(|| {
        Error::InvalidScenario(format!("user transaction {t} carries no value"))
    })?;
    let approved = block_valid(state, p);
    let mut terms = Vec::new();
    if approved && state.block.contains(&t) {
        let pay = payments
            .per_tx
            .get(&t)
            .ok_or_else(|| Error::InvalidScenario(format!("no payment computed for {t}")))?;
        terms.push(("value", value * &p.s));
        terms.push(("burn", -&pay.burn));
        terms.push(("producer_fee", -&pay.bp));
        if let Some((_, cm)) = &pay.cm {
            terms.push(("committee_fee", -cm));
        }
    }
    Ok(UtilityReport::of(GameParty::User(t), approved, terms))
}

/// Utility of includer `j`: committee-fee income from non-self block
/// transactions, minus the forfeited bribe for carrying the target, minus
/// the listing cost for every non-self listed transaction, minus what its
/// own planted transactions in the block pay out. Income and plant outflow
/// are zeroed when the block is rejected; the bribe loss and listing cost
/// always apply.
pub fn includer_utility(
    j: u32,
    state: &GameState,
    payments: &PaymentBreakdown,
    assignment: &TypeAssignment,
    target: TxId,
    p: &ScenarioParams,
) -> Result<UtilityReport> {
    let list = state
        .lists
        .get(j as usize - 1)
        .ok_or_else(|| Error::InvalidScenario(format!("no list published by includer {j}")))?;
    let approved = block_valid(state, p);
    let own = Origin::Includer(j);
    let mut terms = Vec::new();

    if approved {
        let mut income = Money::zero();
        for (id, pay) in &payments.per_tx {
            if let Some((order, amount)) = &pay.cm {
                if *order == j && state.tx(*id)?.origin != own {
                    income += amount;
                }
            }
        }
        terms.push(("fee_income", income));
    }

    terms.push((
        "bribe_loss",
        -bribe_loss(Party::Includer(j), state, assignment, target, p)?,
    ));

    let mut listed_non_self = 0usize;
    for id in list {
        if state.tx(*id)?.origin != own {
            listed_non_self += 1;
        }
    }
    terms.push((
        "listing_cost",
        -(p.mu_cm_fee() * Money::from_count(listed_non_self)),
    ));

    if approved {
        let mut outflow = Money::zero();
        for (id, pay) in &payments.per_tx {
            if state.tx(*id)?.origin != own {
                continue;
            }
            outflow += &pay.burn;
            outflow += &pay.bp;
            if let Some((order, amount)) = &pay.cm {
                // A committee fee routed back to j itself is a wash.
                if *order != j {
                    outflow += amount;
                }
            }
        }
        terms.push(("own_plant_outflow", -outflow));
    }

    Ok(UtilityReport::of(GameParty::Includer(j), approved, terms))
}

/// Utility of the block producer: producer-fee income net of inclusion cost
/// from non-self block transactions, minus the forfeited bribe for carrying
/// the target, minus what its own planted block transactions pay out (their
/// producer fee returns to itself), minus the marginal cost `gamma` of every
/// mempool plant. Income and plant outflow are zeroed on rejection; the
/// bribe loss and the plant cost always apply.
pub fn bp_utility(
    state: &GameState,
    payments: &PaymentBreakdown,
    assignment: &TypeAssignment,
    target: TxId,
    p: &ScenarioParams,
) -> Result<UtilityReport> {
    let approved = block_valid(state, p);
    let mut terms = Vec::new();

    if approved {
        let mut income = Money::zero();
        for (id, pay) in &payments.per_tx {
            if state.tx(*id)?.origin != Origin::BlockProducer {
                income += &pay.bp;
                income -= p.mu_bp_fee();
            }
        }
        terms.push(("fee_income", income));
    }

    terms.push((
        "bribe_loss",
        -bribe_loss(Party::BlockProducer, state, assignment, target, p)?,
    ));

    if approved {
        let mut outflow = Money::zero();
        for (id, pay) in &payments.per_tx {
            if state.tx(*id)?.origin != Origin::BlockProducer {
                continue;
            }
            outflow += &pay.burn;
            if let Some((_, amount)) = &pay.cm {
                outflow += amount;
            }
        }
        terms.push(("own_plant_outflow", -outflow));
    }

    let mut plant_cost = Money::zero();
    for t in &state.fake_init_bp {
        plant_cost += &p.gamma * fee_total(&t.bid, p);
    }
    terms.push(("plant_cost", -plant_cost));

    Ok(UtilityReport::of(GameParty::BlockProducer, approved, terms))
}

/// Realized utility of any party.
pub fn party_utility(
    party: GameParty,
    state: &GameState,
    payments: &PaymentBreakdown,
    assignment: &TypeAssignment,
    target: TxId,
    p: &ScenarioParams,
) -> Result<UtilityReport> {
    match party {
        GameParty::User(t) => user_utility(t, state, payments, p),
        GameParty::Includer(j) => includer_utility(j, state, payments, assignment, target, p),
        GameParty::BlockProducer => bp_utility(state, payments, assignment, target, p),
    }
}

/// The exact probability-weighted mean of `eval` over the joint committee
/// type vectors of `belief`, skipping the marginal of includer `skip` (whose
/// type stays as assigned). Errors unless the weights sum to one.
pub fn expected_over_types<F>(
    belief: &BeliefCm,
    assignment: &TypeAssignment,
    skip: Option<u32>,
    mut eval: F,
) -> Result<Money>
where
    F: FnMut(&TypeAssignment) -> Result<Money>,
{
    let mut acc = Money::zero();
    let mut total_prob = Money::zero();
    for (vector, prob) in belief.type_vectors(skip) {
        let mut drawn = assignment.clone();
        for (i, ty) in vector.into_iter().enumerate() {
            if let Some(ty) = ty {
                if let Some(slot) = drawn.cm.get_mut(i) {
                    *slot = ty;
                }
            }
        }
        acc += &prob * eval(&drawn)?;
        total_prob += prob;
    }
    if total_prob != Money::from_int(1) {
        return Err(Error::BadDistribution(total_prob));
    }
    Ok(acc)
}

/// Interim-Bayesian expected utility of `party` in a fixed final state: its
/// realized utility weighted over the other includers' types drawn from
/// `belief` (an includer's own type stays as assigned; the producer's type
/// is common knowledge). With the state fixed this equals the realized
/// utility, which is the belief-irrelevance the checks assert.
pub fn expected_utility(
    party: GameParty,
    state: &GameState,
    payments: &PaymentBreakdown,
    assignment: &TypeAssignment,
    belief: &BeliefCm,
    target: TxId,
    p: &ScenarioParams,
) -> Result<Money> {
    let skip = match party {
        GameParty::Includer(j) => Some(j),
        _ => None,
    };
    expected_over_types(belief, assignment, skip, |drawn| {
        Ok(party_utility(party, state, payments, drawn, target, p)?.total)
    })
}
