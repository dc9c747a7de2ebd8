//! The indicated (rule-following) strategies and the payment assembly.
//!
//! The mechanism publishes a rule for each role. Includers jointly list the
//! best committee-fee transactions a rule-following producer would include,
//! split across lists in order; the producer fills the block with the best
//! producer-fee transactions it is willing to carry. Payments are then read
//! off the final state: every block transaction burns `r * s`, pays its
//! producer fee, and pays its committee fee to the smallest-order includer
//! that listed it. Under the prioritized mechanism a listed-and-included
//! transaction pays its whole fee to that includer and nothing to the
//! producer.

use std::collections::{BTreeMap, BTreeSet};

use crate::core::{
    bp_fee, cm_fee, fee_total, Bid, GameState, ScenarioParams, Sender, SenderVariant, TfmKind,
    Transaction, TxId,
};
use crate::money::Money;
use crate::{Error, Result};

/// How the producer's preference over candidates is computed.
enum BpView<'a> {
    /// The real phase-3 view: published lists are known. Only this view lets
    /// the prioritized mechanism skip listed transactions.
    WithLists(&'a [BTreeSet<TxId>]),
    /// The includers' phase-2 simulation of the producer, before any list
    /// exists.
    Presimulation,
}

fn is_listed(lists: &[BTreeSet<TxId>], id: TxId) -> bool {
    lists.iter().any(|l| l.contains(&id))
}

/// Whether a rule-following producer is willing to include `t` at all.
fn bp_eligible(t: &Transaction, view: &BpView<'_>, p: &ScenarioParams) -> bool {
    let cost_covered = t.bid.cap() >= &(&p.r + &p.mu_cost_bp);
    match &t.bid {
        Bid::Double { delta_bp, .. } => cost_covered && delta_bp >= &p.mu_cost_bp,
        Bid::Single { .. } => cost_covered,
        Bid::SinglePrioritized { .. } => match view {
            // Listed transactions pay the producer nothing, so the rule
            // spends no block space on them.
            BpView::WithLists(lists) => !is_listed(lists, t.id) && cost_covered,
            BpView::Presimulation => cost_covered,
        },
    }
}

/// Eligible candidates by producer fee descending, ties to the lower id.
fn bp_preference<'a>(
    candidates: &[&'a Transaction],
    view: &BpView<'_>,
    p: &ScenarioParams,
) -> Vec<&'a Transaction> {
    let mut pref: Vec<&Transaction> = candidates
        .iter()
        .copied()
        .filter(|t| bp_eligible(t, view, p))
        .collect();
    pref.sort_by(|a, b| {
        bp_fee(&b.bid, p)
            .cmp(&bp_fee(&a.bid, p))
            .then(a.id.cmp(&b.id))
    });
    pref
}

/// Greedily takes up to `cap` transactions in preference order, skipping
/// repeated senders when the scenario requires unique senders.
fn take_capacity(pref: &[&Transaction], cap: usize, p: &ScenarioParams) -> BTreeSet<TxId> {
    let mut out = BTreeSet::new();
    let mut senders: BTreeSet<&Sender> = BTreeSet::new();
    for t in pref {
        if out.len() >= cap {
            break;
        }
        if p.senders == SenderVariant::UniqueSender && !senders.insert(&t.sender) {
            continue;
        }
        out.insert(t.id);
    }
    out
}

/// The block a rule-following producer assembles from `candidates` (the
/// mempool plus every listed transaction) given the published lists. The
/// prioritized producer, whose eligibility bar skips listed transactions,
/// tops the block up with them when room remains so an uncongested block
/// still satisfies every list.
pub fn indicated_block(
    candidates: &[&Transaction],
    lists: &[BTreeSet<TxId>],
    p: &ScenarioParams,
) -> BTreeSet<TxId> {
    let pref = bp_preference(candidates, &BpView::WithLists(lists), p);
    let mut block = take_capacity(&pref, p.c_block as usize, p);
    if block.len() < p.c_block as usize {
        let mut listed: Vec<&Transaction> = candidates
            .iter()
            .copied()
            .filter(|t| !block.contains(&t.id) && is_listed(lists, t.id))
            .collect();
        listed.sort_by(|a, b| {
            fee_total(&b.bid, p)
                .cmp(&fee_total(&a.bid, p))
                .then(a.id.cmp(&b.id))
        });
        let mut senders: BTreeSet<&Sender> = BTreeSet::new();
        if p.senders == SenderVariant::UniqueSender {
            for t in candidates {
                if block.contains(&t.id) {
                    senders.insert(&t.sender);
                }
            }
        }
        for t in listed {
            if block.len() >= p.c_block as usize {
                break;
            }
            if p.senders == SenderVariant::UniqueSender && !senders.insert(&t.sender) {
                continue;
            }
            block.insert(t.id);
        }
    }
    block
}

/// The inclusion lists rule-following includers publish over the visible
/// mempool: they simulate the producer, rank the simulated block's
/// transactions by committee fee (descending, ties to the lower id), drop
/// those below the listing cost, and deal the rest out to lists in includer
/// order, each list taking at most `c_incl`.
pub fn indicated_inclusion_lists(
    mempool: &[&Transaction],
    p: &ScenarioParams,
) -> Vec<BTreeSet<TxId>> {
    let pref = bp_preference(mempool, &BpView::Presimulation, p);
    let simulated = take_capacity(&pref, p.c_block as usize, p);
    let mut ranked: Vec<&Transaction> = mempool
        .iter()
        .copied()
        .filter(|t| simulated.contains(&t.id) && cm_fee(&t.bid, p) >= p.mu_cm_fee())
        .collect();
    ranked.sort_by(|a, b| {
        cm_fee(&b.bid, p)
            .cmp(&cm_fee(&a.bid, p))
            .then(a.id.cmp(&b.id))
    });

    let mut lists = vec![BTreeSet::new(); p.m as usize];
    let mut senders: Vec<BTreeSet<&Sender>> = vec![BTreeSet::new(); p.m as usize];
    for t in ranked {
        for j in 0..p.m as usize {
            if lists[j].len() >= p.c_incl as usize {
                continue;
            }
            if p.senders == SenderVariant::UniqueSender && senders[j].contains(&t.sender) {
                continue;
            }
            lists[j].insert(t.id);
            senders[j].insert(&t.sender);
            break;
        }
    }
    lists
}

/// Plays every role by its rule over a genuine mempool.
pub fn indicated_state(m0: Vec<Transaction>, p: &ScenarioParams) -> GameState {
    let mut state = GameState::new(m0, p.m);
    state.lists = indicated_inclusion_lists(&state.mempool(), p);
    state.block = indicated_block(&state.mempool(), &state.lists, p);
    state
}

/// The bid the mechanism recommends to a user with per-unit value `v` when
/// the block is not congested.
pub fn recommended_bid(kind: TfmKind, v: &Money, p: &ScenarioParams) -> Result<Bid> {
    let cap = v.clone().min(&p.r + &p.mu_cost_bp);
    match kind {
        TfmKind::Double => Ok(Bid::Double {
            delta_cm: Money::zero(),
            delta_bp: p.mu_cost_bp.clone(),
            c: cap,
        }),
        TfmKind::Single => Ok(Bid::Single { c: cap }),
        TfmKind::SinglePrioritized => Err(Error::UnsupportedMechanism {
            what: "a recommended truthful bid".into(),
            mechanism: "the prioritized mechanism".into(),
        }),
    }
}

/// What one block transaction pays, and to whom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TxPayment {
    /// Burned amount, `r * s`.
    pub burn: Money,
    /// Paid to the block producer.
    pub bp: Money,
    /// Paid to an includer: `(order, amount)`, the smallest-order includer
    /// whose list holds the transaction. `None` when no list holds it.
    pub cm: Option<(u32, Money)>,
}

impl TxPayment {
    /// Everything the sender pays for this transaction.
    pub fn total(&self) -> Money {
        let cm = self.cm.as_ref().map(|(_, a)| a.clone()).unwrap_or_default();
        &self.burn + &self.bp + cm
    }
}

/// Payments of every block transaction in the final state.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PaymentBreakdown {
    pub per_tx: BTreeMap<TxId, TxPayment>,
}

impl PaymentBreakdown {
    /// Total burned in the block.
    pub fn total_burn(&self) -> Money {
        self.per_tx.values().map(|p| &p.burn).sum()
    }

    /// Total routed to the producer.
    pub fn total_bp(&self) -> Money {
        self.per_tx.values().map(|p| &p.bp).sum()
    }

    /// Total routed to includer `j` (1-based order).
    pub fn total_cm_for(&self, j: u32) -> Money {
        self.per_tx
            .values()
            .filter_map(|p| p.cm.as_ref())
            .filter(|(order, _)| *order == j)
            .map(|(_, a)| a.clone())
            .sum()
    }
}

/// The order of the smallest-order includer whose list holds `id`.
fn smallest_lister(lists: &[BTreeSet<TxId>], id: TxId) -> Option<u32> {
    lists
        .iter()
        .position(|l| l.contains(&id))
        .map(|i| i as u32 + 1)
}

/// Reads every payment off the final state. Fees are charged only inside the
/// block; committee fees require a list that holds the transaction.
pub fn compute_payments(state: &GameState, p: &ScenarioParams) -> Result<PaymentBreakdown> {
    let mut per_tx = BTreeMap::new();
    for t in state.block_txs()? {
        let lister = smallest_lister(&state.lists, t.id);
        let payment = match &t.bid {
            Bid::Double { .. } | Bid::Single { .. } => TxPayment {
                burn: p.burn(),
                bp: bp_fee(&t.bid, p),
                cm: lister.map(|j| (j, cm_fee(&t.bid, p))),
            },
            Bid::SinglePrioritized { .. } => match lister {
                Some(j) => TxPayment {
                    burn: p.burn(),
                    bp: Money::zero(),
                    cm: Some((j, cm_fee(&t.bid, p))),
                },
                None => TxPayment {
                    burn: p.burn(),
                    bp: bp_fee(&t.bid, p),
                    cm: None,
                },
            },
        };
        per_tx.insert(t.id, payment);
    }
    Ok(PaymentBreakdown { per_tx })
}
