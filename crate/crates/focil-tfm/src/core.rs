//! Core game objects: transactions, bids, parameters, fee formulas, ordered
//! fee lists, and the phase-by-phase game state with block validity.
//!
//! The model is a one-shot game over a shared mempool. In phase 1 the
//! includers and the block producer may plant fake transactions in the
//! mempool; in phase 2 each includer publishes an inclusion list (possibly
//! with direct fakes of its own); in phase 3 the block producer assembles the
//! block. Fees are computed per transaction from its bid and the scenario
//! parameters, always as exact rationals and always already multiplied by the
//! size `s` (every transaction has the same size).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::money::Money;
use crate::{Error, Result};

/// Identifier of a transaction. Lower ids break every ordering tie.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct TxId(pub u64);

impl fmt::Display for TxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Account that signs a transaction. Conflicting spends from one sender are
/// how the block producer can retroactively invalidate its own plants.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sender(pub String);

impl Sender {
    /// Convenience constructor.
    pub fn new(s: impl Into<String>) -> Self {
        Sender(s.into())
    }
}

/// Who created a transaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// A genuine user transaction with a private value.
    User,
    /// Fake planted by the includer with this 1-based order.
    Includer(u32),
    /// Fake planted by the block producer.
    BlockProducer,
}

/// Which fee mechanism the scenario runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TfmKind {
    /// Separate committee and block-producer bids under a shared cap.
    Double,
    /// One bid, split between the parties by the protocol parameter `z`.
    Single,
    /// One bid; listed-and-included transactions pay the committee only.
    SinglePrioritized,
}

/// Whether an inclusion-listed transaction may be left out of a full block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListVariant {
    /// A listed transaction may be missing only from a full block.
    Conditional,
    /// A listed transaction must be included (or invalidated) regardless.
    Unconditional,
}

/// Whether one sender may appear multiple times in a single list or block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SenderVariant {
    /// No per-sender restriction.
    MultiSender,
    /// At most one transaction per sender in each inclusion list and in the
    /// block.
    UniqueSender,
}

/// A bid under one of the three mechanisms. All components are per unit of
/// size; fees multiply by `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bid {
    /// Committee tip `delta_cm`, producer tip `delta_bp`, and total cap `c`.
    Double {
        delta_cm: Money,
        delta_bp: Money,
        c: Money,
    },
    /// Total cap `c`; the surplus over the producer's cost is split by `z`.
    Single { c: Money },
    /// Total cap `c`; routing depends on list and block membership.
    SinglePrioritized { c: Money },
}

impl Bid {
    /// The mechanism this bid belongs to.
    pub fn kind(&self) -> TfmKind {
        match self {
            Bid::Double { .. } => TfmKind::Double,
            Bid::Single { .. } => TfmKind::Single,
            Bid::SinglePrioritized { .. } => TfmKind::SinglePrioritized,
        }
    }

    /// The per-unit cap `c`, the most a sender can be charged per unit
    /// (burn included).
    pub fn cap(&self) -> &Money {
        match self {
            Bid::Double { c, .. } | Bid::Single { c } | Bid::SinglePrioritized { c } => c,
        }
    }

    /// A zero bid of the given mechanism, used by fillers and invalidators.
    pub fn zero(kind: TfmKind) -> Bid {
        match kind {
            TfmKind::Double => Bid::Double {
                delta_cm: Money::zero(),
                delta_bp: Money::zero(),
                c: Money::zero(),
            },
            TfmKind::Single => Bid::Single { c: Money::zero() },
            TfmKind::SinglePrioritized => Bid::SinglePrioritized { c: Money::zero() },
        }
    }

    /// Rejects bids with negative components.
    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, v: &Money| {
            if v.is_negative() {
                Err(Error::InvalidScenario(format!("negative bid field {name}")))
            } else {
                Ok(())
            }
        };
        match self {
            Bid::Double {
                delta_cm,
                delta_bp,
                c,
            } => {
                nonneg("delta_cm", delta_cm)?;
                nonneg("delta_bp", delta_bp)?;
                nonneg("c", c)
            }
            Bid::Single { c } | Bid::SinglePrioritized { c } => nonneg("c", c),
        }
    }
}

/// A transaction as seen by the mechanism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transaction {
    pub id: TxId,
    pub sender: Sender,
    /// Private per-unit value; `None` for fakes, which have no use value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Money>,
    pub origin: Origin,
    pub bid: Bid,
    /// Free-form observable metadata; plays no role in any formula.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub public_info: String,
    /// If set, including this transaction in the block invalidates every
    /// mempool plant from the named sender (a conflicting spend).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invalidates: Option<Sender>,
}

impl Transaction {
    /// A genuine user transaction.
    pub fn user(id: u64, sender: &str, value: Money, bid: Bid) -> Transaction {
        Transaction {
            id: TxId(id),
            sender: Sender::new(sender),
            value: Some(value),
            origin: Origin::User,
            bid,
            public_info: String::new(),
            invalidates: None,
        }
    }

    /// A fake transaction planted by a strategic party.
    pub fn fake(id: u64, sender: &str, origin: Origin, bid: Bid) -> Transaction {
        Transaction {
            id: TxId(id),
            sender: Sender::new(sender),
            value: None,
            origin,
            bid,
            public_info: String::new(),
            invalidates: None,
        }
    }

    /// A producer-sent conflicting spend that invalidates the plants of
    /// `target_sender`. It bids `c = r` so it covers exactly its own burn.
    pub fn invalidator(id: u64, target_sender: &Sender, p: &ScenarioParams, kind: TfmKind) -> Transaction {
        let bid = match kind {
            TfmKind::Double => Bid::Double {
                delta_cm: Money::zero(),
                delta_bp: Money::zero(),
                c: p.r.clone(),
            },
            TfmKind::Single => Bid::Single { c: p.r.clone() },
            TfmKind::SinglePrioritized => Bid::SinglePrioritized { c: p.r.clone() },
        };
        Transaction {
            id: TxId(id),
            sender: target_sender.clone(),
            value: None,
            origin: Origin::BlockProducer,
            bid,
            public_info: String::new(),
            invalidates: Some(target_sender.clone()),
        }
    }
}

/// Scenario-wide protocol and cost parameters. All per-unit quantities
/// (`s` multiplies them into absolute fees).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    /// Number of includers.
    pub m: u32,
    /// Block capacity in transactions.
    pub c_block: u32,
    /// Per-includer list capacity in transactions.
    pub c_incl: u32,
    /// Common transaction size.
    pub s: Money,
    /// Per-unit burn rate; every block transaction burns `r * s`.
    pub r: Money,
    /// Marginal cost rate of the producer for carrying a fake in the mempool.
    pub gamma: Money,
    /// Per-unit cost of an includer for listing a transaction.
    pub mu_cost_cm: Money,
    /// Per-unit cost of the producer for including a transaction.
    pub mu_cost_bp: Money,
    /// Committee share of the surplus under [`TfmKind::Single`].
    pub z: Money,
    /// Smallest money step used by bid grids and one-unit perturbations.
    pub unit: Money,
    pub lists: ListVariant,
    pub senders: SenderVariant,
}

impl ScenarioParams {
    /// Checks ranges: positive sizes and capacities, non-negative rates,
    /// `z` in `[0, 1]`, positive `unit`.
    pub fn validate(&self) -> Result<()> {
        let err = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if self.m == 0 {
            return err("m must be at least 1");
        }
        if self.c_block == 0 || self.c_incl == 0 {
            return err("capacities must be at least 1");
        }
        if !self.s.is_positive() {
            return err("s must be positive");
        }
        if self.r.is_negative()
            || self.gamma.is_negative()
            || self.mu_cost_cm.is_negative()
            || self.mu_cost_bp.is_negative()
        {
            return err("rates must be non-negative");
        }
        if self.z.is_negative() || self.z > Money::from_int(1) {
            return err("z must lie in [0, 1]");
        }
        if !self.unit.is_positive() {
            return err("unit must be positive");
        }
        Ok(())
    }

    /// The includer's absolute listing cost, `mu_cost_cm * s`.
    pub fn mu_cm_fee(&self) -> Money {
        &self.mu_cost_cm * &self.s
    }

    /// The producer's absolute inclusion cost, `mu_cost_bp * s`.
    pub fn mu_bp_fee(&self) -> Money {
        &self.mu_cost_bp * &self.s
    }

    /// The absolute burn per block transaction, `r * s`.
    pub fn burn(&self) -> Money {
        &self.r * &self.s
    }
}

/// The absolute fee the block producer collects from one transaction under
/// its mechanism. For [`TfmKind::SinglePrioritized`] this is the amount paid
/// when the transaction is in no inclusion list; listed-and-included
/// transactions pay the producer nothing (see payment assembly).
pub fn bp_fee(bid: &Bid, p: &ScenarioParams) -> Money {
    let surplus = (bid.cap() - &p.r) * &p.s;
    match bid {
        Bid::Double { delta_bp, .. } => (delta_bp * &p.s).min(surplus).clamp_zero(),
        Bid::Single { .. } => {
            let guaranteed = p.mu_bp_fee().min(surplus.clone());
            let shared = (surplus - p.mu_bp_fee()).clamp_zero();
            let bp_share = Money::from_int(1) - &p.z;
            (guaranteed + shared * bp_share).clamp_zero()
        }
        Bid::SinglePrioritized { .. } => surplus.clamp_zero(),
    }
}

/// The absolute fee one includer collects from one transaction. For
/// [`TfmKind::SinglePrioritized`] this is the full fee routed to the
/// smallest-order includer when the transaction is listed and included.
pub fn cm_fee(bid: &Bid, p: &ScenarioParams) -> Money {
    let surplus = (bid.cap() - &p.r) * &p.s;
    match bid {
        Bid::Double {
            delta_cm, delta_bp, ..
        } => {
            let bp_part = (delta_bp * &p.s).min(surplus.clone());
            ((delta_cm * &p.s).min(surplus - bp_part)).clamp_zero()
        }
        Bid::Single { .. } => (surplus - p.mu_bp_fee()).clamp_zero() * &p.z,
        Bid::SinglePrioritized { .. } => surplus.clamp_zero(),
    }
}

/// The absolute total fee of a transaction (burn excluded), the base of the
/// producer's marginal cost `gamma` for mempool plants.
pub fn fee_total(bid: &Bid, p: &ScenarioParams) -> Money {
    match bid {
        Bid::Double { .. } => bp_fee(bid, p) + cm_fee(bid, p),
        Bid::Single { .. } | Bid::SinglePrioritized { .. } => {
            ((bid.cap() - &p.r) * &p.s).clamp_zero()
        }
    }
}

/// A fee-ranked transaction list with 1-based positions. Fees beyond the end
/// of the list read as zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedFeeList {
    entries: Vec<(TxId, Money)>,
}

impl OrderedFeeList {
    fn from_unsorted(mut entries: Vec<(TxId, Money)>) -> Self {
        entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        OrderedFeeList { entries }
    }

    /// The ranked `(id, fee)` pairs, best first.
    pub fn entries(&self) -> &[(TxId, Money)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based position of `id`, or `None` if it is not on the list.
    pub fn position(&self, id: TxId) -> Option<usize> {
        self.entries.iter().position(|(t, _)| *t == id).map(|i| i + 1)
    }

    /// The fee at a 1-based position; zero past the end of the list.
    pub fn fee_at(&self, pos: usize) -> Money {
        assert!(pos >= 1, "fee positions are 1-based");
        self.entries
            .get(pos - 1)
            .map(|(_, f)| f.clone())
            .unwrap_or_else(Money::zero)
    }

    /// The ids of the first `n` entries.
    pub fn prefix_ids(&self, n: usize) -> Vec<TxId> {
        self.entries.iter().take(n).map(|(t, _)| *t).collect()
    }
}

/// The producer-fee ranking `L_BP`: transactions whose producer fee covers
/// the producer's cost, by fee descending, ties to the lower id.
pub fn build_l_bp<'a, I>(txs: I, p: &ScenarioParams) -> OrderedFeeList
where
    I: IntoIterator<Item = &'a Transaction>,
{
    let floor = p.mu_bp_fee();
    let entries = txs
        .into_iter()
        .filter_map(|t| {
            let f = bp_fee(&t.bid, p);
            (f >= floor).then_some((t.id, f))
        })
        .collect();
    OrderedFeeList::from_unsorted(entries)
}

/// The committee-fee ranking `L_CM`: transactions within the first
/// `min(c_block, |L_BP|)` positions of `L_BP` whose committee fee covers the
/// includer's cost, by committee fee descending, ties to the lower id.
pub fn build_l_cm<'a, I>(txs: I, p: &ScenarioParams) -> OrderedFeeList
where
    I: IntoIterator<Item = &'a Transaction> + Clone,
{
    let l_bp = build_l_bp(txs.clone(), p);
    let window: BTreeSet<TxId> = l_bp
        .prefix_ids((p.c_block as usize).min(l_bp.len()))
        .into_iter()
        .collect();
    let floor = p.mu_cm_fee();
    let entries = txs
        .into_iter()
        .filter_map(|t| {
            if !window.contains(&t.id) {
                return None;
            }
            let f = cm_fee(&t.bid, p);
            (f >= floor).then_some((t.id, f))
        })
        .collect();
    OrderedFeeList::from_unsorted(entries)
}

/// Full game state after the three phases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameState {
    /// Genuine user transactions in the mempool.
    pub m0: Vec<Transaction>,
    /// Phase-1 mempool plants per includer (index `j - 1`).
    pub fake_init_cm: Vec<Vec<Transaction>>,
    /// Phase-1 mempool plants by the producer.
    pub fake_init_bp: Vec<Transaction>,
    /// Phase-2 direct plants per includer, present only in that list.
    pub fake_direct_cm: Vec<Vec<Transaction>>,
    /// Phase-3 direct plants by the producer (fillers and invalidators).
    pub fake_direct_bp: Vec<Transaction>,
    /// Published inclusion lists (index `j - 1`).
    pub lists: Vec<BTreeSet<TxId>>,
    /// The block.
    pub block: BTreeSet<TxId>,
}

impl GameState {
    /// A state over a genuine mempool with `m` empty lists and no block.
    pub fn new(m0: Vec<Transaction>, m: u32) -> GameState {
        GameState {
            m0,
            fake_init_cm: vec![Vec::new(); m as usize],
            fake_init_bp: Vec::new(),
            fake_direct_cm: vec![Vec::new(); m as usize],
            fake_direct_bp: Vec::new(),
            lists: vec![BTreeSet::new(); m as usize],
            block: BTreeSet::new(),
        }
    }

    /// Everything visible in the mempool after phase 1.
    pub fn mempool(&self) -> Vec<&Transaction> {
        self.m0
            .iter()
            .chain(self.fake_init_cm.iter().flatten())
            .chain(self.fake_init_bp.iter())
            .collect()
    }

    /// Every transaction in the state, any pool.
    pub fn all_transactions(&self) -> Vec<&Transaction> {
        self.mempool()
            .into_iter()
            .chain(self.fake_direct_cm.iter().flatten())
            .chain(self.fake_direct_bp.iter())
            .collect()
    }

    /// Looks a transaction up by id across all pools.
    pub fn tx(&self, id: TxId) -> Result<&Transaction> {
        self.all_transactions()
            .into_iter()
            .find(|t| t.id == id)
            .ok_or(Error::UnknownTx(id))
    }

    /// Transactions of the block, in id order.
    pub fn block_txs(&self) -> Result<Vec<&Transaction>> {
        self.block.iter().map(|&id| self.tx(id)).collect()
    }

    /// The ids of producer mempool plants that a block entry invalidates
    /// (a conflicting spend from the same sender).
    pub fn invalidated_ids(&self) -> BTreeSet<TxId> {
        let targets: BTreeSet<&Sender> = self
            .block
            .iter()
            .filter_map(|&id| self.tx(id).ok())
            .filter_map(|t| t.invalidates.as_ref())
            .collect();
        self.fake_init_bp
            .iter()
            .filter(|t| targets.contains(&t.sender))
            .map(|t| t.id)
            .collect()
    }

    /// Structural checks: unique ids, coherent origins and pool membership,
    /// capacity bounds, sender-uniqueness when required, and invalidators
    /// aimed only at producer plants.
    pub fn validate(&self, p: &ScenarioParams) -> Result<()> {
        let err = |msg: String| Err(Error::InvalidScenario(msg));
        if self.fake_init_cm.len() != p.m as usize
            || self.fake_direct_cm.len() != p.m as usize
            || self.lists.len() != p.m as usize
        {
            return err("per-includer pools must have length m".into());
        }
        let all = self.all_transactions();
        let mut seen = BTreeSet::new();
        for t in &all {
            if !seen.insert(t.id) {
                return err(format!("duplicate transaction id {}", t.id));
            }
            t.bid.validate()?;
            if t.bid.kind() != all[0].bid.kind() {
                return err("all bids must use the same mechanism".into());
            }
        }
        for t in &self.m0 {
            if t.origin != Origin::User || t.value.is_none() {
                return err(format!("mempool transaction {} must be a user's", t.id));
            }
        }
        for (i, pool) in self.fake_init_cm.iter().chain(self.fake_direct_cm.iter()).enumerate() {
            let j = (i % p.m as usize) as u32 + 1;
            for t in pool {
                if t.origin != Origin::Includer(j) || t.value.is_some() {
                    return err(format!("transaction {} must be a fake of includer {j}", t.id));
                }
            }
        }
        for t in self.fake_init_bp.iter().chain(self.fake_direct_bp.iter()) {
            if t.origin != Origin::BlockProducer || t.value.is_some() {
                return err(format!("transaction {} must be a producer fake", t.id));
            }
        }
        let mempool_ids: BTreeSet<TxId> = self.mempool().iter().map(|t| t.id).collect();
        let bp_fake_senders: BTreeSet<&Sender> =
            self.fake_init_bp.iter().map(|t| &t.sender).collect();
        for t in &all {
            if let Some(target) = &t.invalidates {
                if !bp_fake_senders.contains(target) {
                    return err(format!(
                        "invalidator {} targets a sender with no producer plant",
                        t.id
                    ));
                }
                if t.origin != Origin::BlockProducer {
                    return err(format!("invalidator {} must come from the producer", t.id));
                }
            }
        }
        for (i, list) in self.lists.iter().enumerate() {
            if list.len() > p.c_incl as usize {
                return err(format!("list {} exceeds c_incl", i + 1));
            }
            let direct: BTreeSet<TxId> = self.fake_direct_cm[i].iter().map(|t| t.id).collect();
            for id in list {
                if !mempool_ids.contains(id) && !direct.contains(id) {
                    return err(format!(
                        "list {} contains {} which is neither in the mempool nor its own plant",
                        i + 1,
                        id
                    ));
                }
            }
            self.check_sender_unique(list, p, &format!("list {}", i + 1))?;
        }
        if self.block.len() > p.c_block as usize {
            return err("block exceeds c_block".into());
        }
        let listed: BTreeSet<TxId> = self.lists.iter().flatten().copied().collect();
        let bp_direct: BTreeSet<TxId> = self.fake_direct_bp.iter().map(|t| t.id).collect();
        for id in &self.block {
            if !mempool_ids.contains(id) && !listed.contains(id) && !bp_direct.contains(id) {
                return err(format!("block contains unreachable transaction {id}"));
            }
        }
        self.check_sender_unique(&self.block, p, "block")?;
        Ok(())
    }

    fn check_sender_unique(
        &self,
        ids: &BTreeSet<TxId>,
        p: &ScenarioParams,
        what: &str,
    ) -> Result<()> {
        if p.senders != SenderVariant::UniqueSender {
            return Ok(());
        }
        let mut senders = BTreeSet::new();
        for &id in ids {
            let t = self.tx(id)?;
            if !senders.insert(&t.sender) {
                return Err(Error::InvalidScenario(format!(
                    "{what} holds two transactions from sender {:?}",
                    t.sender.0
                )));
            }
        }
        Ok(())
    }
}

/// Whether the block satisfies the inclusion-list constraint. A listed
/// transaction missing from the block is excused if it was invalidated by a
/// conflicting block entry, or (under [`ListVariant::Conditional`]) if the
/// block is full.
pub fn block_valid(state: &GameState, p: &ScenarioParams) -> bool {
    let invalidated = state.invalidated_ids();
    let block_full = state.block.len() >= p.c_block as usize;
    for list in &state.lists {
        for id in list {
            if state.block.contains(id) || invalidated.contains(id) {
                continue;
            }
            match p.lists {
                ListVariant::Conditional if block_full => continue,
                _ => return false,
            }
        }
    }
    true
}

/// Membership of one transaction in each list and in the block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionVector {
    /// `lists[j - 1]` is true when list `j` holds the transaction.
    pub lists: Vec<bool>,
    pub block: bool,
}

impl InclusionVector {
    /// True if any inclusion list holds the transaction.
    pub fn in_any_list(&self) -> bool {
        self.lists.iter().any(|&b| b)
    }
}

/// The inclusion vector of `target` in the given state.
pub fn inclusion_vector(state: &GameState, target: TxId) -> InclusionVector {
    InclusionVector {
        lists: state.lists.iter().map(|l| l.contains(&target)).collect(),
        block: state.block.contains(&target),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn params(kind: TfmKind) -> ScenarioParams {
        let _ = kind;
        ScenarioParams {
            m: 2,
            c_block: 2,
            c_incl: 1,
            s: Money::from_int(1),
            r: Money::from_int(1),
            gamma: Money::zero(),
            mu_cost_cm: Money::zero(),
            mu_cost_bp: Money::zero(),
            z: Money::ratio(1, 2),
            unit: Money::from_int(1),
            lists: ListVariant::Conditional,
            senders: SenderVariant::MultiSender,
        }
    }

    fn double(delta_cm: i64, delta_bp: i64, c: i64) -> Bid {
        Bid::Double {
            delta_cm: Money::from_int(delta_cm),
            delta_bp: Money::from_int(delta_bp),
            c: Money::from_int(c),
        }
    }

    #[test]
    fn double_bid_fees_cap_at_surplus() {
        let p = params(TfmKind::Double);
        let bid = double(2, 3, 7);
        assert_eq!(bp_fee(&bid, &p), Money::from_int(3));
        assert_eq!(cm_fee(&bid, &p), Money::from_int(2));
        assert_eq!(fee_total(&bid, &p), Money::from_int(5));

        // Producer tip exhausts the surplus; the committee tip is crowded out.
        let tight = double(4, 5, 4);
        assert_eq!(bp_fee(&tight, &p), Money::from_int(3));
        assert_eq!(cm_fee(&tight, &p), Money::zero());

        // Cap below the burn rate clamps both fees to zero.
        let dust = double(1, 1, 0);
        assert_eq!(bp_fee(&dust, &p), Money::zero());
        assert_eq!(cm_fee(&dust, &p), Money::zero());
    }

    #[test]
    fn single_bid_splits_surplus_over_producer_cost() {
        let mut p = params(TfmKind::Single);
        p.mu_cost_bp = Money::from_int(1);
        let bid = Bid::Single { c: Money::from_int(5) };
        assert_eq!(bp_fee(&bid, &p), Money::ratio(5, 2));
        assert_eq!(cm_fee(&bid, &p), Money::ratio(3, 2));
        assert_eq!(fee_total(&bid, &p), Money::from_int(4));

        // Surplus below the producer cost leaves nothing to split.
        let low = Bid::Single { c: Money::ratio(3, 2) };
        assert_eq!(bp_fee(&low, &p), Money::ratio(1, 2));
        assert_eq!(cm_fee(&low, &p), Money::zero());
    }

    #[test]
    fn single_prioritized_fees_are_the_full_surplus() {
        let p = params(TfmKind::SinglePrioritized);
        let bid = Bid::SinglePrioritized { c: Money::from_int(4) };
        assert_eq!(bp_fee(&bid, &p), Money::from_int(3));
        assert_eq!(cm_fee(&bid, &p), Money::from_int(3));
        assert_eq!(fee_total(&bid, &p), Money::from_int(3));
        let dust = Bid::SinglePrioritized { c: Money::ratio(1, 2) };
        assert_eq!(bp_fee(&dust, &p), Money::zero());
    }

    #[test]
    fn producer_ranking_sorts_by_fee_then_id() {
        let mut p = params(TfmKind::Double);
        p.mu_cost_bp = Money::from_int(2);
        p.c_block = 3;
        let txs = vec![
            Transaction::user(3, "a", Money::from_int(9), double(1, 2, 9)),
            Transaction::user(1, "b", Money::from_int(9), double(0, 4, 9)),
            Transaction::user(2, "c", Money::from_int(9), double(0, 4, 9)),
            Transaction::user(4, "d", Money::from_int(9), double(0, 1, 9)), // below cost
        ];
        let l = build_l_bp(&txs, &p);
        assert_eq!(
            l.entries().iter().map(|(t, _)| t.0).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        assert_eq!(l.position(TxId(3)), Some(3));
        assert_eq!(l.position(TxId(4)), None);
        assert_eq!(l.fee_at(1), Money::from_int(4));
        assert_eq!(l.fee_at(9), Money::zero());
    }

    #[test]
    fn committee_ranking_restricts_to_the_block_window() {
        let mut p = params(TfmKind::Double);
        p.c_block = 2;
        p.mu_cost_cm = Money::from_int(1);
        let txs = vec![
            Transaction::user(1, "a", Money::from_int(9), double(2, 5, 9)),
            Transaction::user(2, "b", Money::from_int(9), double(3, 4, 9)),
            // Best committee fee, but outside the first c_block producer slots.
            Transaction::user(3, "c", Money::from_int(9), double(6, 3, 9)),
            // Inside the window, committee fee below the listing cost.
            Transaction::user(4, "d", Money::from_int(9), double(0, 6, 9)),
        ];
        // Producer ranking is 4, 1, 2, 3; the window holds {4, 1} and tx 4's
        // committee fee is below the listing cost.
        let l = build_l_cm(&txs, &p);
        assert_eq!(
            l.entries().iter().map(|(t, _)| t.0).collect::<Vec<_>>(),
            vec![1]
        );
        let l_with_room = {
            let mut p = p.clone();
            p.c_block = 4;
            build_l_cm(&txs, &p)
        };
        assert_eq!(
            l_with_room.entries().iter().map(|(t, _)| t.0).collect::<Vec<_>>(),
            vec![3, 2, 1]
        );
    }

    fn two_tx_state(p: &ScenarioParams) -> GameState {
        let txs = vec![
            Transaction::user(1, "a", Money::from_int(9), double(1, 3, 9)),
            Transaction::user(2, "b", Money::from_int(9), double(1, 2, 9)),
        ];
        let mut st = GameState::new(txs, p.m);
        st.lists[0].insert(TxId(1));
        st.lists[1].insert(TxId(2));
        st
    }

    #[test]
    fn conditional_lists_excuse_only_full_blocks() {
        let p = params(TfmKind::Double);
        let mut st = two_tx_state(&p);
        st.block.insert(TxId(1));
        assert!(!block_valid(&st, &p), "room left and tx 2 listed but missing");
        let filler = Transaction::fake(10, "bp", Origin::BlockProducer, double(0, 0, 1));
        st.fake_direct_bp.push(filler);
        st.block.insert(TxId(10));
        assert!(block_valid(&st, &p), "full block excuses the omission");
    }

    #[test]
    fn unconditional_lists_never_excuse_omissions() {
        let mut p = params(TfmKind::Double);
        p.lists = ListVariant::Unconditional;
        let mut st = two_tx_state(&p);
        st.block.insert(TxId(1));
        let filler = Transaction::fake(10, "bp", Origin::BlockProducer, double(0, 0, 1));
        st.fake_direct_bp.push(filler);
        st.block.insert(TxId(10));
        assert!(!block_valid(&st, &p));
        st.block.remove(&TxId(10));
        st.block.insert(TxId(2));
        assert!(block_valid(&st, &p));
    }

    #[test]
    fn invalidated_plants_are_excused() {
        let mut p = params(TfmKind::Double);
        p.lists = ListVariant::Unconditional;
        let mut st = two_tx_state(&p);
        let plant = Transaction::fake(5, "bp-plant", Origin::BlockProducer, double(0, 8, 9));
        st.lists[0].insert(TxId(5));
        st.fake_init_bp.push(plant);
        st.block.insert(TxId(1));
        st.block.insert(TxId(2));
        assert!(!block_valid(&st, &p), "listed plant is missing");

        let inv = Transaction::invalidator(6, &Sender::new("bp-plant"), &p, TfmKind::Double);
        st.fake_direct_bp.push(inv);
        st.block.remove(&TxId(2));
        st.block.insert(TxId(6));
        st.lists[1].clear();
        assert!(block_valid(&st, &p), "conflicting spend invalidates the plant");
        assert_eq!(st.invalidated_ids(), BTreeSet::from([TxId(5)]));
    }

    #[test]
    fn state_validation_catches_structural_errors() {
        let p = params(TfmKind::Double);
        let mut st = two_tx_state(&p);
        assert!(st.validate(&p).is_ok());
        st.block.insert(TxId(99));
        assert!(matches!(st.validate(&p), Err(Error::InvalidScenario(_))));
        st.block.clear();
        st.lists[0].insert(TxId(2));
        assert!(st.validate(&p).is_err(), "list over capacity");
    }

    #[test]
    fn unique_sender_blocks_duplicate_senders_per_list() {
        let mut p = params(TfmKind::Double);
        p.senders = SenderVariant::UniqueSender;
        p.c_incl = 2;
        let txs = vec![
            Transaction::user(1, "same", Money::from_int(9), double(1, 3, 9)),
            Transaction::user(2, "same", Money::from_int(9), double(1, 2, 9)),
        ];
        let mut st = GameState::new(txs, p.m);
        st.lists[0].insert(TxId(1));
        st.lists[0].insert(TxId(2));
        assert!(st.validate(&p).is_err());
        st.lists[0].remove(&TxId(2));
        st.lists[1].insert(TxId(2));
        assert!(st.validate(&p).is_ok());
    }

    #[test]
    fn inclusion_vector_reports_membership() {
        let p = params(TfmKind::Double);
        let mut st = two_tx_state(&p);
        st.block.insert(TxId(1));
        let v = inclusion_vector(&st, TxId(1));
        assert_eq!(v.lists, vec![true, false]);
        assert!(v.block && v.in_any_list());
        let v2 = inclusion_vector(&st, TxId(2));
        assert_eq!(v2.lists, vec![false, true]);
        assert!(!v2.block);
    }
}
