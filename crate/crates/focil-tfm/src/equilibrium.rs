//! Brute-force deviation search verifying the mechanism's game properties.
//!
//! Each check enumerates a finite, documented strategy space and compares
//! exact utilities against the indicated (rule-following) strategy. Verdicts
//! are `holds` (no enumerated deviation strictly improves), `violated` (a
//! replayable witness improves strictly), or `inconclusive_at_grid` (a
//! theorem hypothesis failed, or the enumeration budget ran out before the
//! space was covered).

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::bribery::{
    admissible_cm_types, bribe_bp_value, bribe_cm_value, critical_order, default_x_grid,
    BeliefCm, BribeType, TypeAssignment,
};
use crate::core::{
    bp_fee, build_l_bp, build_l_cm, cm_fee, fee_total, inclusion_vector, Bid, GameState, Origin,
    ScenarioParams, TfmKind, Transaction, TxId,
};
use crate::money::Money;
use crate::scenario::Scenario;
use crate::tfm::{
    compute_payments, indicated_block, indicated_inclusion_lists, indicated_state,
    recommended_bid,
};
use crate::utilities::{expected_utility, party_utility, GameParty};
use crate::{Error, Result};

/// Finite search bounds for the deviation enumerations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategySpace {
    /// Fee levels planted transactions may bid. Absent, the levels present
    /// in the mempool, each one smallest unit up and down, plus zero.
    pub fake_fee_grid: Option<Vec<Money>>,
    /// Flat amounts scanned for third-type committee offers. Absent, a
    /// spread around the target's committee fee.
    pub x_grid: Option<Vec<Money>>,
    /// Largest identical-bid batch planted into the mempool. Absent, the
    /// block capacity.
    pub max_fakes_mempool: Option<u32>,
    /// Most plants placed directly into a list.
    pub max_fakes_direct: u32,
    /// Explicit bids scanned per user in the dominant-strategy check.
    /// Absent, an even grid over each user's value.
    pub bid_grid: Option<Vec<Bid>>,
    /// Steps when deriving the bid grid (k steps give k+1 cap levels).
    pub bid_grid_steps: u32,
    /// Hard cap on enumerated deviation states before reporting
    /// `inconclusive_at_grid`.
    pub max_states: u64,
}

impl Default for StrategySpace {
    fn default() -> StrategySpace {
        StrategySpace {
            fake_fee_grid: None,
            x_grid: None,
            max_fakes_mempool: None,
            max_fakes_direct: 2,
            bid_grid: None,
            bid_grid_steps: 24,
            max_states: 500_000,
        }
    }
}

impl StrategySpace {
    /// Grid sanity: explicit grids must be nonempty and nonnegative.
    pub fn validate(&self) -> Result<()> {
        for (name, grid) in [("fake_fee_grid", &self.fake_fee_grid), ("x_grid", &self.x_grid)] {
            if let Some(g) = grid {
                if g.is_empty() {
                    return Err(Error::InvalidParams(format!("{name} is empty")));
                }
                if g.iter().any(Money::is_negative) {
                    return Err(Error::InvalidParams(format!("{name} holds a negative fee")));
                }
            }
        }
        if let Some(bids) = &self.bid_grid {
            if bids.is_empty() {
                return Err(Error::InvalidParams("bid_grid is empty".into()));
            }
            for b in bids {
                b.validate()?;
            }
        }
        if self.bid_grid_steps == 0 {
            return Err(Error::InvalidParams("bid_grid_steps must be positive".into()));
        }
        if self.max_states == 0 {
            return Err(Error::InvalidParams("max_states must be positive".into()));
        }
        Ok(())
    }
}

/// The property a report speaks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropertyKind {
    #[serde(rename = "DSIC")]
    Dsic,
    #[serde(rename = "MCBN")]
    Mcbn,
    #[serde(rename = "MBBN")]
    Mbbn,
    CensorshipResistant,
    FairUnderCongestion,
    NotFair,
    /// Threshold-against-enumeration consistency in the plant-free model;
    /// produced by the analysis layer, never by scenario checks.
    SimplifiedConsistency,
}

impl PropertyKind {
    /// The report name of the property.
    pub fn name(&self) -> &'static str {
        match self {
            PropertyKind::Dsic => "DSIC",
            PropertyKind::Mcbn => "MCBN",
            PropertyKind::Mbbn => "MBBN",
            PropertyKind::CensorshipResistant => "CensorshipResistant",
            PropertyKind::FairUnderCongestion => "FairUnderCongestion",
            PropertyKind::NotFair => "NotFair",
            PropertyKind::SimplifiedConsistency => "SimplifiedConsistency",
        }
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PropertyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<PropertyKind> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "dsic" => Ok(PropertyKind::Dsic),
            "mcbn" => Ok(PropertyKind::Mcbn),
            "mbbn" => Ok(PropertyKind::Mbbn),
            "censorshipresistant" | "censorship" => Ok(PropertyKind::CensorshipResistant),
            "fairundercongestion" | "fair" => Ok(PropertyKind::FairUnderCongestion),
            "notfair" => Ok(PropertyKind::NotFair),
            "simplifiedconsistency" => Ok(PropertyKind::SimplifiedConsistency),
            other => Err(Error::InvalidParams(format!("unknown property {other:?}"))),
        }
    }
}

/// Outcome of one property check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    InconclusiveAtGrid,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::InconclusiveAtGrid => "inconclusive_at_grid",
        })
    }
}

/// A strictly improving deviation, stored with everything needed to replay
/// it: both final states, the realized types, and the exact utilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationWitness {
    pub party: GameParty,
    pub description: String,
    pub target: TxId,
    pub assignment: TypeAssignment,
    pub baseline: GameState,
    pub deviation: GameState,
    pub baseline_utility: Money,
    pub deviation_utility: Money,
}

/// A bid that placed an excluded transaction into a list and the block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FairBidWitness {
    pub tx: TxId,
    pub bid: Bid,
    /// The order of the list that carries the rebid transaction.
    pub list_order: u32,
    pub in_block: bool,
}

/// An algebraic impossibility: the lowest requirement no bid can reach.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapWitness {
    pub description: String,
    pub shortfall: Money,
}

/// An allocation rule whose output moved when only bribes moved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyWitness {
    pub policy: String,
    pub description: String,
    pub swing: Money,
}

/// Evidence attached to a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Deviation(Box<DeviationWitness>),
    FairBids(Vec<FairBidWitness>),
    Gap(GapWitness),
    PolicyDivergence(PolicyWitness),
}

/// Result of one property check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: PropertyKind,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// The witness's strict gain when violated; the largest enumerated gain
    /// (at most zero) when the verdict holds and a search ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility_delta: Option<Money>,
    /// Set when the verdict is inconclusive because a theorem hypothesis
    /// failed, as opposed to an exhausted search budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precondition_unmet: Option<String>,
    #[serde(default)]
    pub deviations_checked: u64,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl PropertyReport {
    fn new(property: PropertyKind, verdict: Verdict) -> PropertyReport {
        PropertyReport {
            property,
            verdict,
            witness: None,
            utility_delta: None,
            precondition_unmet: None,
            deviations_checked: 0,
            notes: Vec::new(),
        }
    }

    fn precondition(property: PropertyKind, reason: impl Into<String>) -> PropertyReport {
        let reason = reason.into();
        let mut r = PropertyReport::new(property, Verdict::InconclusiveAtGrid);
        r.notes.push(format!("hypothesis unmet: {reason}"));
        r.precondition_unmet = Some(reason);
        r
    }

    fn budget_exhausted(property: PropertyKind, checked: u64, budget: u64) -> PropertyReport {
        let mut r = PropertyReport::new(property, Verdict::InconclusiveAtGrid);
        r.deviations_checked = checked;
        r.notes.push(format!(
            "enumeration stopped at the {budget}-state budget before covering the space; raise max_states"
        ));
        r
    }
}

/// Recomputes a deviation witness's utilities from its stored states and
/// returns the replayed gain, erroring if anything fails to reproduce.
pub fn replay_deviation(w: &DeviationWitness, p: &ScenarioParams) -> Result<Money> {
    let base_pay = compute_payments(&w.baseline, p)?;
    let dev_pay = compute_payments(&w.deviation, p)?;
    let base = party_utility(w.party, &w.baseline, &base_pay, &w.assignment, w.target, p)?.total;
    let dev = party_utility(w.party, &w.deviation, &dev_pay, &w.assignment, w.target, p)?.total;
    if base != w.baseline_utility || dev != w.deviation_utility {
        return Err(Error::InvalidScenario(
            "witness replay diverged from the recorded utilities".into(),
        ));
    }
    Ok(dev - base)
}

struct Counter {
    used: u64,
    budget: u64,
}

impl Counter {
    fn new(budget: u64) -> Counter {
        Counter { used: 0, budget }
    }

    fn tick(&mut self) -> bool {
        self.used += 1;
        self.used <= self.budget
    }
}

/// Fee levels present in the mempool, each one unit up and down, plus zero.
fn default_fee_grid(m0: &[Transaction], p: &ScenarioParams) -> Vec<Money> {
    let mut levels: BTreeSet<Money> = BTreeSet::new();
    levels.insert(Money::zero());
    for t in m0 {
        for fee in [bp_fee(&t.bid, p), cm_fee(&t.bid, p), fee_total(&t.bid, p)] {
            levels.insert((&fee - &p.unit).clamp_zero());
            levels.insert(&fee + &p.unit);
            levels.insert(fee);
        }
    }
    levels.into_iter().collect()
}

/// Bids a plant can make so that its fees sit at `level`: the double bid
/// splits the premium toward the producer, the committee, or both.
fn fake_bids(kind: TfmKind, level: &Money, p: &ScenarioParams) -> Vec<Bid> {
    let q = level / &p.s;
    let mut bids = Vec::new();
    let mut push = |b: Bid| {
        if !bids.contains(&b) {
            bids.push(b);
        }
    };
    match kind {
        TfmKind::Double => {
            for (dcm, dbp) in [
                (Money::zero(), q.clone()),
                (q.clone(), Money::zero()),
                (q.clone(), q.clone()),
            ] {
                push(Bid::Double {
                    c: &p.r + &dcm + &dbp,
                    delta_cm: dcm,
                    delta_bp: dbp,
                });
            }
        }
        TfmKind::Single => push(Bid::Single { c: &p.r + &q }),
        TfmKind::SinglePrioritized => push(Bid::SinglePrioritized { c: &p.r + &q }),
    }
    bids
}

/// Identical-bid plant batches: the empty batch plus every (bid shape, fee
/// level, count) combination. Best responses in the underlying analysis sit
/// at or next to existing fee boundaries, which the default grid covers; the
/// identical-bid restriction is the documented discretization.
fn plant_batches(
    kind: TfmKind,
    grid: &[Money],
    max_count: u32,
    p: &ScenarioParams,
) -> Vec<Vec<Bid>> {
    let mut batches = vec![Vec::new()];
    for level in grid {
        for bid in fake_bids(kind, level, p) {
            for k in 1..=max_count {
                batches.push(vec![bid.clone(); k as usize]);
            }
        }
    }
    batches
}

fn materialize(bids: &[Bid], origin: Origin, prefix: &str, first_id: u64) -> Vec<Transaction> {
    bids.iter()
        .enumerate()
        .map(|(i, b)| {
            Transaction::fake(first_id + i as u64, &format!("{prefix}{}", i + 1), origin, b.clone())
        })
        .collect()
}

/// Outcome key of a plant batch: the induced fee profile and the lists the
/// indicated includers publish over it. Batches agreeing on both lead to
/// identical downstream states, so one representative suffices.
fn batch_outcome_key(
    fakes: &[Transaction],
    lists: &[BTreeSet<TxId>],
    p: &ScenarioParams,
) -> String {
    let mut fees: Vec<String> = fakes
        .iter()
        .map(|t| {
            format!(
                "{}|{}|{}",
                bp_fee(&t.bid, p),
                cm_fee(&t.bid, p),
                (t.bid.cap() - &p.r).clamp_zero()
            )
        })
        .collect();
    fees.sort();
    let lists_part: Vec<String> = lists
        .iter()
        .map(|l| l.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    format!("{}#{}", fees.join(";"), lists_part.join("/"))
}

fn with_cm_type(assignment: &TypeAssignment, j: u32, ty: &BribeType) -> TypeAssignment {
    let mut a = assignment.clone();
    a.cm[j as usize - 1] = ty.clone();
    a
}

fn next_free_id(m0: &[Transaction]) -> u64 {
    m0.iter().map(|t| t.id.0).max().unwrap_or(0) + 1
}

fn ids(set: &BTreeSet<TxId>) -> String {
    set.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(", ")
}

/// Checks that the recommended truthful bid is a dominant strategy for every
/// user on an even bid grid, against every profile of other users drawn from
/// their original and recommended bids, with all proposers indicated.
pub fn check_dsic(scenario: &Scenario, tfm: TfmKind) -> Result<PropertyReport> {
    scenario.validate()?;
    if tfm != scenario.tfm {
        return Err(Error::InvalidScenario(
            "the mechanism argument disagrees with the scenario".into(),
        ));
    }
    let p = &scenario.params;
    let kind = PropertyKind::Dsic;

    for t in &scenario.txs {
        if t.bid.cap() > t.value.as_ref().expect("validated") {
            return Ok(PropertyReport::precondition(
                kind,
                format!("transaction {} overbids its value", t.id),
            ));
        }
    }
    let covering = scenario
        .txs
        .iter()
        .filter(|t| t.value.as_ref().expect("validated") >= &p.r)
        .count();
    if covering >= p.c_block as usize {
        return Ok(PropertyReport::precondition(
            kind,
            format!(
                "the burn rate is too low: {covering} values reach it but the block holds {}",
                p.c_block
            ),
        ));
    }

    let mut counter = Counter::new(scenario.space.max_states);
    let mut max_delta: Option<Money> = None;
    let others: Vec<usize> = (0..scenario.txs.len()).collect();
    let mut report = PropertyReport::new(kind, Verdict::Holds);

    for (ti, tx) in scenario.txs.iter().enumerate() {
        let value = tx.value.clone().expect("validated");
        let recommended = recommended_bid(tfm, &value, p)?;
        let grid = match &scenario.space.bid_grid {
            Some(bids) => {
                if bids.iter().any(|b| b.cap() > &value) {
                    return Ok(PropertyReport::precondition(
                        kind,
                        format!("the bid grid allows overbidding for transaction {}", tx.id),
                    ));
                }
                let mut g = bids.clone();
                if !g.contains(&recommended) {
                    g.push(recommended.clone());
                }
                g
            }
            None => derive_bid_grid(tfm, &value, tx.bid.clone(), &recommended, scenario, p)?,
        };

        let other_idx: Vec<usize> = others.iter().copied().filter(|i| *i != ti).collect();
        for profile in 0u32..(1 << other_idx.len()) {
            let mut base_m0 = scenario.txs.clone();
            for (bit, oi) in other_idx.iter().enumerate() {
                if profile & (1 << bit) != 0 {
                    let v = base_m0[*oi].value.clone().expect("validated");
                    base_m0[*oi].bid = recommended_bid(tfm, &v, p)?;
                }
            }
            let mut rec_m0 = base_m0.clone();
            rec_m0[ti].bid = recommended.clone();
            let rec_state = indicated_state(rec_m0, p);
            let rec_pay = compute_payments(&rec_state, p)?;
            let rec_u = party_utility(
                GameParty::User(tx.id),
                &rec_state,
                &rec_pay,
                &scenario.assignment,
                scenario.target,
                p,
            )?
            .total;

            for bid in &grid {
                if !counter.tick() {
                    return Ok(PropertyReport::budget_exhausted(
                        kind,
                        counter.used,
                        counter.budget,
                    ));
                }
                let mut m0 = base_m0.clone();
                m0[ti].bid = bid.clone();
                let state = indicated_state(m0, p);
                let pay = compute_payments(&state, p)?;
                let u = party_utility(
                    GameParty::User(tx.id),
                    &state,
                    &pay,
                    &scenario.assignment,
                    scenario.target,
                    p,
                )?
                .total;
                let delta = &u - &rec_u;
                if delta.is_positive() {
                    let mut r = PropertyReport::new(kind, Verdict::Violated);
                    r.utility_delta = Some(delta);
                    r.deviations_checked = counter.used;
                    r.witness = Some(Witness::Deviation(Box::new(DeviationWitness {
                        party: GameParty::User(tx.id),
                        description: format!(
                            "user {} beats the recommended bid with {bid:?} under others' profile {profile:#b}",
                            tx.id
                        ),
                        target: scenario.target,
                        assignment: scenario.assignment.clone(),
                        baseline: rec_state,
                        deviation: state,
                        baseline_utility: rec_u,
                        deviation_utility: u,
                    })));
                    return Ok(r);
                }
                if max_delta.as_ref().is_none_or(|m| &delta > m) {
                    max_delta = Some(delta);
                }
            }
        }
    }
    report.utility_delta = max_delta;
    report.deviations_checked = counter.used;
    report.notes.push(format!(
        "every user kept the recommended bid against {} enumerated alternatives",
        counter.used
    ));
    Ok(report)
}

/// The derived bid grid: an even sweep of caps up to the value, three
/// premium splits per cap for the double mechanism, plus the user's original
/// and recommended bids.
fn derive_bid_grid(
    tfm: TfmKind,
    value: &Money,
    original: Bid,
    recommended: &Bid,
    scenario: &Scenario,
    p: &ScenarioParams,
) -> Result<Vec<Bid>> {
    let steps = scenario.space.bid_grid_steps;
    let mut grid = Vec::new();
    let mut push = |b: Bid| {
        if !grid.contains(&b) {
            grid.push(b);
        }
    };
    for k in 0..=steps {
        let c = value * Money::ratio(k as i64, steps as i64);
        match tfm {
            TfmKind::Double => {
                let premium = (&c - &p.r).clamp_zero();
                let half = &premium * Money::ratio(1, 2);
                for (dcm, dbp) in [
                    (Money::zero(), premium.clone()),
                    (premium.clone(), Money::zero()),
                    (half.clone(), half),
                ] {
                    push(Bid::Double { delta_cm: dcm, delta_bp: dbp, c: c.clone() });
                }
            }
            TfmKind::Single => push(Bid::Single { c }),
            TfmKind::SinglePrioritized => {
                return Err(Error::UnsupportedMechanism {
                    what: "a truthful bid grid".into(),
                    mechanism: "the prioritized mechanism".into(),
                })
            }
        }
    }
    push(recommended.clone());
    push(original);
    Ok(grid)
}

/// Checks that no includer of any admissible type gains by deviating from
/// the indicated list: it enumerates phase-1 plant batches, direct plants,
/// and every feasible own list over the visible pool, holding everyone else
/// to the indicated rules, and compares exact utilities.
pub fn check_mcbn(
    scenario: &Scenario,
    assignment: &TypeAssignment,
    beliefs: &[BeliefCm],
    space: &StrategySpace,
) -> Result<PropertyReport> {
    scenario.validate()?;
    space.validate()?;
    let p = &scenario.params;
    let kind = PropertyKind::Mcbn;
    let m0 = &scenario.txs;
    let target = scenario.target;

    let base_state = indicated_state(m0.clone(), p);
    let base_pay = compute_payments(&base_state, p)?;
    let critical = critical_order(m0, target, p).ok();
    let target_tx = base_state.tx(target)?.clone();
    let x_grid = space
        .x_grid
        .clone()
        .unwrap_or_else(|| default_x_grid(&cm_fee(&target_tx.bid, p)));
    let fee_grid = space
        .fake_fee_grid
        .clone()
        .unwrap_or_else(|| default_fee_grid(m0, p));
    let max_mem = space.max_fakes_mempool.unwrap_or(p.c_block);
    let batches = plant_batches(scenario.tfm, &fee_grid, max_mem, p);
    let plant_id = next_free_id(m0);
    let direct_id = plant_id + 64;

    let mut counter = Counter::new(space.max_states);
    let mut max_delta: Option<Money> = None;
    let mut distinct_batches = 0u64;
    let mut belief_checks = 0u32;
    let mut tie_notes: Vec<String> = Vec::new();

    for j in 1..=p.m {
        let mut types = admissible_cm_types(j, critical.unwrap_or(0), &x_grid);
        let own = &assignment.cm[j as usize - 1];
        if !types.contains(own) {
            types.push(own.clone());
        }
        let assignments: Vec<TypeAssignment> =
            types.iter().map(|ty| with_cm_type(assignment, j, ty)).collect();
        let mut base_u = Vec::with_capacity(assignments.len());
        for a in &assignments {
            base_u.push(
                party_utility(GameParty::Includer(j), &base_state, &base_pay, a, target, p)?
                    .total,
            );
        }

        let mut seen = BTreeSet::new();
        for bids in &batches {
            let plants = materialize(bids, Origin::Includer(j), &format!("plant-cm{j}-"), plant_id);
            let pool: Vec<&Transaction> = m0.iter().chain(plants.iter()).collect();
            let indicated_lists = indicated_inclusion_lists(&pool, p);
            if !seen.insert(batch_outcome_key(&plants, &indicated_lists, p)) {
                continue;
            }
            distinct_batches += 1;
            let pool_ids: Vec<TxId> = pool.iter().map(|t| t.id).collect();

            for zero_count in 0..=space.max_fakes_direct {
                for top_count in 0..=(space.max_fakes_direct - zero_count) {
                    let direct_total = (zero_count + top_count) as usize;
                    if direct_total > p.c_incl as usize {
                        continue;
                    }
                    let mut direct_bids = vec![Bid::zero(scenario.tfm); zero_count as usize];
                    if top_count > 0 {
                        let top = fee_grid.last().expect("nonempty grid");
                        let top_bid = fake_bids(scenario.tfm, top, p).pop().expect("bid");
                        direct_bids.extend(vec![top_bid; top_count as usize]);
                    }
                    let directs = materialize(
                        &direct_bids,
                        Origin::Includer(j),
                        &format!("plant-cm{j}d-"),
                        direct_id,
                    );

                    let room = p.c_incl as usize - direct_total;
                    for mask in 0u32..(1 << pool_ids.len()) {
                        if mask.count_ones() as usize > room {
                            continue;
                        }
                        if !counter.tick() {
                            let mut r = PropertyReport::budget_exhausted(
                                kind,
                                counter.used,
                                counter.budget,
                            );
                            r.notes.push(format!(
                                "covered {distinct_batches} distinct plant batches before stopping"
                            ));
                            return Ok(r);
                        }
                        let mut own_list: BTreeSet<TxId> = directs.iter().map(|t| t.id).collect();
                        for (bit, id) in pool_ids.iter().enumerate() {
                            if mask & (1 << bit) != 0 {
                                own_list.insert(*id);
                            }
                        }
                        let mut lists = indicated_lists.clone();
                        lists[j as usize - 1] = own_list;
                        let candidates: Vec<&Transaction> =
                            pool.iter().copied().chain(directs.iter()).collect();
                        let block = indicated_block(&candidates, &lists, p);

                        let mut state = GameState::new(m0.clone(), p.m);
                        state.fake_init_cm[j as usize - 1] = plants.clone();
                        state.fake_direct_cm[j as usize - 1] = directs.clone();
                        state.lists = lists;
                        state.block = block;
                        let pay = compute_payments(&state, p)?;

                        for (ai, a) in assignments.iter().enumerate() {
                            let u = party_utility(
                                GameParty::Includer(j),
                                &state,
                                &pay,
                                a,
                                target,
                                p,
                            )?
                            .total;
                            let delta = &u - &base_u[ai];
                            if (belief_checks < 3 || delta.is_positive()) && !beliefs.is_empty() {
                                for belief in beliefs {
                                    let e = expected_utility(
                                        GameParty::Includer(j),
                                        &state,
                                        &pay,
                                        a,
                                        belief,
                                        target,
                                        p,
                                    )?;
                                    if e != u {
                                        return Err(Error::InvalidScenario(
                                            "expected utility diverged from the realized utility"
                                                .into(),
                                        ));
                                    }
                                }
                                belief_checks += 1;
                            }
                            if delta.is_positive() {
                                let mut r = PropertyReport::new(kind, Verdict::Violated);
                                r.utility_delta = Some(delta);
                                r.deviations_checked = counter.used;
                                r.notes.push(format!(
                                    "expected utilities matched the realized ones across {} beliefs",
                                    beliefs.len()
                                ));
                                r.witness = Some(Witness::Deviation(Box::new(DeviationWitness {
                                    party: GameParty::Includer(j),
                                    description: format!(
                                        "includer {j} of type {} plants {} mempool and {} direct entries and publishes list [{}]",
                                        types[ai].name(),
                                        plants.len(),
                                        directs.len(),
                                        ids(&state.lists[j as usize - 1]),
                                    ),
                                    target,
                                    assignment: a.clone(),
                                    baseline: base_state.clone(),
                                    deviation: state.clone(),
                                    baseline_utility: base_u[ai].clone(),
                                    deviation_utility: u,
                                })));
                                return Ok(r);
                            }
                            if delta.is_zero()
                                && !(plants.is_empty() && directs.is_empty())
                                && tie_notes.len() < 3
                            {
                                tie_notes.push(format!(
                                    "tie: includer {j} of type {} breaks even with {} plants and list [{}]",
                                    types[ai].name(),
                                    plants.len() + directs.len(),
                                    ids(&state.lists[j as usize - 1]),
                                ));
                            }
                            if max_delta.as_ref().is_none_or(|m| &delta > m) {
                                max_delta = Some(delta);
                            }
                        }
                    }
                }
            }
        }
    }

    let mut report = PropertyReport::new(kind, Verdict::Holds);
    report.utility_delta = max_delta;
    report.deviations_checked = counter.used;
    report.notes.push(format!(
        "enumerated {} list deviations over {distinct_batches} distinct plant batches",
        counter.used
    ));
    report.notes.push(format!(
        "expected utilities matched the realized ones across {} beliefs",
        beliefs.len()
    ));
    report.notes.extend(tie_notes);
    Ok(report)
}

/// Checks that the producer gains nothing over the indicated block: it
/// enumerates phase-1 plant batches, block subsets over the visible pool
/// plus one invalidator per plant, and zero-or-full padding with burn-only
/// fillers, holding the includers to the indicated rules.
pub fn check_mbbn(
    scenario: &Scenario,
    assignment: &TypeAssignment,
    space: &StrategySpace,
) -> Result<PropertyReport> {
    scenario.validate()?;
    space.validate()?;
    let p = &scenario.params;
    let kind = PropertyKind::Mbbn;
    let m0 = &scenario.txs;
    let target = scenario.target;

    let base_state = indicated_state(m0.clone(), p);
    let base_pay = compute_payments(&base_state, p)?;
    let base_u =
        party_utility(GameParty::BlockProducer, &base_state, &base_pay, assignment, target, p)?
            .total;

    let fee_grid = space
        .fake_fee_grid
        .clone()
        .unwrap_or_else(|| default_fee_grid(m0, p));
    let max_mem = space.max_fakes_mempool.unwrap_or(p.c_block);
    let batches = plant_batches(scenario.tfm, &fee_grid, max_mem, p);
    let plant_id = next_free_id(m0);
    let invalidator_id = plant_id + 64;
    let filler_id = plant_id + 128;

    let mut counter = Counter::new(space.max_states);
    let mut max_delta: Option<Money> = None;
    let mut distinct_batches = 0u64;
    let mut tie_notes: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();

    let filler_bid = match scenario.tfm {
        TfmKind::Double => Bid::Double {
            delta_cm: Money::zero(),
            delta_bp: Money::zero(),
            c: p.r.clone(),
        },
        TfmKind::Single => Bid::Single { c: p.r.clone() },
        TfmKind::SinglePrioritized => Bid::SinglePrioritized { c: p.r.clone() },
    };

    for bids in &batches {
        let plants = materialize(bids, Origin::BlockProducer, "plant-bp-", plant_id);
        let pool: Vec<&Transaction> = m0.iter().chain(plants.iter()).collect();
        let lists = indicated_inclusion_lists(&pool, p);
        if !seen.insert(batch_outcome_key(&plants, &lists, p)) {
            continue;
        }
        distinct_batches += 1;

        let invalidators: Vec<Transaction> = plants
            .iter()
            .enumerate()
            .map(|(i, plant)| {
                Transaction::invalidator(
                    invalidator_id + i as u64,
                    &plant.sender,
                    p,
                    scenario.tfm,
                )
            })
            .collect();
        let items: Vec<&Transaction> =
            pool.iter().copied().chain(invalidators.iter()).collect();
        if items.len() >= 22 {
            let mut r = PropertyReport::budget_exhausted(kind, counter.used, counter.budget);
            r.notes.push(format!(
                "{} block candidates exceed the enumerable range",
                items.len()
            ));
            return Ok(r);
        }

        for mask in 0u32..(1 << items.len()) {
            if mask.count_ones() > p.c_block {
                continue;
            }
            let chosen: Vec<&Transaction> = items
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask & (1 << bit) != 0)
                .map(|(_, t)| *t)
                .collect();
            // A plant and its invalidator conflict; no block carries both.
            let conflicted = chosen.iter().any(|t| {
                t.invalidates.is_some()
                    && chosen
                        .iter()
                        .any(|o| o.id != t.id && Some(&o.sender) == t.invalidates.as_ref())
            });
            if conflicted {
                continue;
            }
            let used_invalidators: Vec<Transaction> = chosen
                .iter()
                .filter(|t| t.invalidates.is_some())
                .map(|t| (*t).clone())
                .collect();

            let free = p.c_block as usize - chosen.len();
            let pads: &[usize] = if free == 0 { &[0] } else { &[0, free] };
            for &pad in pads {
                if !counter.tick() {
                    return Ok(PropertyReport::budget_exhausted(kind, counter.used, counter.budget));
                }
                let fillers = materialize(
                    &vec![filler_bid.clone(); pad],
                    Origin::BlockProducer,
                    "fill-",
                    filler_id,
                );
                let mut block: BTreeSet<TxId> = chosen.iter().map(|t| t.id).collect();
                block.extend(fillers.iter().map(|t| t.id));

                let mut state = GameState::new(m0.clone(), p.m);
                state.fake_init_bp = plants.clone();
                state.fake_direct_bp = used_invalidators
                    .iter()
                    .cloned()
                    .chain(fillers.iter().cloned())
                    .collect();
                state.lists = lists.clone();
                state.block = block;
                let pay = compute_payments(&state, p)?;
                let u = party_utility(
                    GameParty::BlockProducer,
                    &state,
                    &pay,
                    assignment,
                    target,
                    p,
                )?
                .total;
                let delta = &u - &base_u;
                if delta.is_positive() {
                    let mut r = PropertyReport::new(kind, Verdict::Violated);
                    r.utility_delta = Some(delta);
                    r.deviations_checked = counter.used;
                    r.witness = Some(Witness::Deviation(Box::new(DeviationWitness {
                        party: GameParty::BlockProducer,
                        description: format!(
                            "the producer plants {} mempool entries, invalidates {}, pads {} slots and builds block [{}]",
                            plants.len(),
                            used_invalidators.len(),
                            pad,
                            ids(&state.block),
                        ),
                        target,
                        assignment: assignment.clone(),
                        baseline: base_state.clone(),
                        deviation: state.clone(),
                        baseline_utility: base_u.clone(),
                        deviation_utility: u,
                    })));
                    return Ok(r);
                }
                if delta.is_zero()
                    && !(plants.is_empty() && state.block == base_state.block)
                    && tie_notes.len() < 3
                {
                    tie_notes.push(format!(
                        "tie: the producer breaks even with {} plants and block [{}]",
                        plants.len(),
                        ids(&state.block),
                    ));
                }
                if max_delta.as_ref().is_none_or(|m| &delta > m) {
                    max_delta = Some(delta);
                }
            }
        }
    }

    let mut report = PropertyReport::new(kind, Verdict::Holds);
    report.utility_delta = max_delta;
    report.deviations_checked = counter.used;
    report.notes.push(format!(
        "enumerated {} block deviations over {distinct_batches} distinct plant batches",
        counter.used
    ));
    report.notes.extend(tie_notes);
    Ok(report)
}

/// Omission offers per transaction, as seen by an allocation rule.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BribeOffers {
    pub committee: BTreeMap<TxId, Money>,
    pub producer: BTreeMap<TxId, Money>,
}

impl BribeOffers {
    fn scaled(&self, by: i64) -> BribeOffers {
        let scale = Money::from_int(by);
        BribeOffers {
            committee: self
                .committee
                .iter()
                .map(|(k, v)| (*k, v * &scale))
                .collect(),
            producer: self.producer.iter().map(|(k, v)| (*k, v * &scale)).collect(),
        }
    }

    fn total(&self) -> Money {
        self.committee.values().sum::<Money>() + self.producer.values().sum::<Money>()
    }
}

/// An allocation rule under test: it sees the mempool, the lists, and the
/// standing bribe offers. Indicated rules must ignore the offers.
pub trait AllocationPolicy {
    fn name(&self) -> String;
    fn inclusion_lists(
        &self,
        mempool: &[&Transaction],
        offers: &BribeOffers,
        p: &ScenarioParams,
    ) -> Vec<BTreeSet<TxId>>;
    fn block(
        &self,
        candidates: &[&Transaction],
        lists: &[BTreeSet<TxId>],
        offers: &BribeOffers,
        p: &ScenarioParams,
    ) -> BTreeSet<TxId>;
}

/// The mechanism's indicated rules, which take no bribe input at all.
pub struct IndicatedPolicy;

impl AllocationPolicy for IndicatedPolicy {
    fn name(&self) -> String {
        "indicated".into()
    }

    fn inclusion_lists(
        &self,
        mempool: &[&Transaction],
        _offers: &BribeOffers,
        p: &ScenarioParams,
    ) -> Vec<BTreeSet<TxId>> {
        indicated_inclusion_lists(mempool, p)
    }

    fn block(
        &self,
        candidates: &[&Transaction],
        lists: &[BTreeSet<TxId>],
        _offers: &BribeOffers,
        p: &ScenarioParams,
    ) -> BTreeSet<TxId> {
        indicated_block(candidates, lists, p)
    }
}

/// Negative-control fixture: drops any transaction with a positive omission
/// offer before running the indicated rules. Exists to prove the resistance
/// check can fail.
pub struct BribeSwayedFixture;

impl AllocationPolicy for BribeSwayedFixture {
    fn name(&self) -> String {
        "bribe-swayed fixture".into()
    }

    fn inclusion_lists(
        &self,
        mempool: &[&Transaction],
        offers: &BribeOffers,
        p: &ScenarioParams,
    ) -> Vec<BTreeSet<TxId>> {
        let kept: Vec<&Transaction> = mempool
            .iter()
            .copied()
            .filter(|t| !offers.committee.get(&t.id).is_some_and(Money::is_positive))
            .collect();
        indicated_inclusion_lists(&kept, p)
    }

    fn block(
        &self,
        candidates: &[&Transaction],
        lists: &[BTreeSet<TxId>],
        offers: &BribeOffers,
        p: &ScenarioParams,
    ) -> BTreeSet<TxId> {
        let kept: Vec<&Transaction> = candidates
            .iter()
            .copied()
            .filter(|t| !offers.producer.get(&t.id).is_some_and(Money::is_positive))
            .collect();
        indicated_block(&kept, lists, p)
    }
}

/// The scenario's standing offers: the target's committee and producer caps.
fn standing_offers(scenario: &Scenario) -> BribeOffers {
    let p = &scenario.params;
    let mut offers = BribeOffers::default();
    if let Ok(v) = bribe_cm_value(&BribeType::Cm1, scenario.target, &scenario.txs, p, true) {
        if v.is_positive() {
            offers.committee.insert(scenario.target, v);
        }
    }
    if let Ok(v) = bribe_bp_value(scenario.target, &scenario.txs, p) {
        if v.is_positive() {
            offers.producer.insert(scenario.target, v);
        }
    }
    offers
}

/// Runs one allocation rule with all offers zeroed and tenfold and demands
/// bit-identical lists and blocks.
pub fn check_policy_censorship_resistance(
    policy: &dyn AllocationPolicy,
    scenario: &Scenario,
) -> Result<PropertyReport> {
    scenario.validate()?;
    let p = &scenario.params;
    let kind = PropertyKind::CensorshipResistant;
    let offers = standing_offers(scenario);
    let mempool: Vec<&Transaction> = scenario.txs.iter().collect();

    let zeroed = offers.scaled(0);
    let tenfold = offers.scaled(10);
    let lists_zero = policy.inclusion_lists(&mempool, &zeroed, p);
    let lists_ten = policy.inclusion_lists(&mempool, &tenfold, p);
    let block_zero = policy.block(&mempool, &lists_zero, &zeroed, p);
    let block_ten = policy.block(&mempool, &lists_ten, &tenfold, p);

    let mut report = PropertyReport::new(kind, Verdict::Holds);
    report.deviations_checked = 2;
    if lists_zero == lists_ten && block_zero == block_ten {
        report.utility_delta = Some(Money::zero());
        report.notes.push(format!(
            "the {} rules produced bit-identical lists and blocks with offers zeroed and tenfold",
            policy.name()
        ));
        return Ok(report);
    }
    report.verdict = Verdict::Violated;
    let description = if lists_zero != lists_ten {
        format!(
            "the inclusion lists moved with the offers: {:?} against {:?}",
            lists_zero, lists_ten
        )
    } else {
        format!(
            "the block moved with the offers: [{}] against [{}]",
            ids(&block_zero),
            ids(&block_ten)
        )
    };
    let swing = tenfold.total().max(p.unit.clone());
    report.utility_delta = Some(swing.clone());
    report.witness = Some(Witness::PolicyDivergence(PolicyWitness {
        policy: policy.name(),
        description,
        swing,
    }));
    Ok(report)
}

/// Structural censorship resistance of the indicated rules: allocations are
/// computed from bids alone, so scaling every standing bribe cannot move
/// them.
pub fn check_censorship_resistance(scenario: &Scenario, tfm: TfmKind) -> Result<PropertyReport> {
    if tfm != scenario.tfm {
        return Err(Error::InvalidScenario(
            "the mechanism argument disagrees with the scenario".into(),
        ));
    }
    check_policy_censorship_resistance(&IndicatedPolicy, scenario)
}

/// Checks fairness under congestion: every transaction the indicated play
/// excludes gets the constructive witness bid (premiums one unit above every
/// relevant threshold), and the re-run must land it in a list and the block.
pub fn check_fair_under_congestion(scenario: &Scenario, tfm: TfmKind) -> Result<PropertyReport> {
    scenario.validate()?;
    if tfm != scenario.tfm {
        return Err(Error::InvalidScenario(
            "the mechanism argument disagrees with the scenario".into(),
        ));
    }
    let p = &scenario.params;
    let kind = PropertyKind::FairUnderCongestion;
    if tfm == TfmKind::SinglePrioritized {
        return Ok(PropertyReport::precondition(
            kind,
            "the prioritized mechanism is assessed by the dedicated unfairness check",
        ));
    }
    let w = scenario.txs.len();
    if w <= p.c_block as usize {
        return Ok(PropertyReport::precondition(
            kind,
            format!("not congested: {w} transactions fit the {}-slot block", p.c_block),
        ));
    }

    if tfm == TfmKind::Single && p.z.is_zero() && p.mu_cm_fee().is_positive() {
        let shortfall = p.mu_cm_fee();
        let mut r = PropertyReport::new(kind, Verdict::Violated);
        r.utility_delta = Some(shortfall.clone());
        r.witness = Some(Witness::Gap(GapWitness {
            description: "the committee share is zero, so no bid covers the listing cost".into(),
            shortfall,
        }));
        return Ok(r);
    }

    let base_state = indicated_state(scenario.txs.clone(), p);
    let excluded: Vec<TxId> = scenario
        .txs
        .iter()
        .map(|t| t.id)
        .filter(|id| !base_state.block.contains(id))
        .collect();
    let mut fair = Vec::new();
    let mut checked = 0u64;

    for t in &excluded {
        let others: Vec<&Transaction> = scenario.txs.iter().filter(|x| x.id != *t).collect();
        let l_bp = build_l_bp(others.iter().copied(), p);
        let l_cm = build_l_cm(others.iter().copied(), p);
        let need_bp = l_bp.fee_at(p.c_block as usize).max(p.mu_bp_fee()) + &p.unit;
        let need_cm =
            l_cm.fee_at((p.m * p.c_incl) as usize).max(p.mu_cm_fee()) + &p.unit;

        let bid = match tfm {
            TfmKind::Double => {
                let delta_bp = &need_bp / &p.s;
                let delta_cm = &need_cm / &p.s;
                Bid::Double {
                    c: &p.r + &delta_bp + &delta_cm,
                    delta_cm,
                    delta_bp,
                }
            }
            TfmKind::Single => {
                // bp share: mu.s + (fee - mu.s)(1 - z); cm share: (fee - mu.s) z.
                let mu = p.mu_bp_fee();
                let one_minus_z = Money::from_int(1) - &p.z;
                if p.z.is_zero() {
                    // mu_cost_cm is zero here, but entering the committee
                    // ranking still takes a positive share no bid provides
                    // when the ranking is contested.
                    if need_cm > Money::zero() && l_cm.len() >= (p.m * p.c_incl) as usize {
                        let mut r = PropertyReport::new(kind, Verdict::Violated);
                        r.utility_delta = Some(need_cm.clone());
                        r.witness = Some(Witness::Gap(GapWitness {
                            description: format!(
                                "transaction {t} cannot reach committee share {need_cm} with a zero split"
                            ),
                            shortfall: need_cm,
                        }));
                        return Ok(r);
                    }
                    Bid::Single { c: &p.r + (&mu + &need_bp) / &p.s }
                } else if one_minus_z.is_zero() && need_bp > mu {
                    let shortfall = &need_bp - &mu;
                    let mut r = PropertyReport::new(kind, Verdict::Violated);
                    r.utility_delta = Some(shortfall.clone());
                    r.witness = Some(Witness::Gap(GapWitness {
                        description: format!(
                            "with the whole premium routed to the committee, no bid lifts the producer share of transaction {t} above {mu}"
                        ),
                        shortfall,
                    }));
                    return Ok(r);
                } else {
                    let from_bp = if need_bp > mu {
                        &mu + (&need_bp - &mu) / &one_minus_z
                    } else {
                        need_bp.clone()
                    };
                    let from_cm = &mu + &need_cm / &p.z;
                    let fee = from_bp.max(from_cm);
                    Bid::Single { c: &p.r + &fee / &p.s }
                }
            }
            TfmKind::SinglePrioritized => unreachable!("gated above"),
        };

        let mut m0 = scenario.txs.clone();
        let slot = m0.iter_mut().find(|x| x.id == *t).expect("member");
        slot.bid = bid.clone();
        // The witness ignores the user's original value: fairness asks only
        // whether some bid exists.
        slot.value = Some(bid.cap().clone());
        let state = indicated_state(m0, p);
        checked += 1;
        let iv = inclusion_vector(&state, *t);
        if iv.in_any_list() && iv.block {
            let order = iv.lists.iter().position(|x| *x).expect("listed") as u32 + 1;
            fair.push(FairBidWitness { tx: *t, bid, list_order: order, in_block: true });
        } else {
            let mut r = PropertyReport::new(kind, Verdict::Violated);
            r.deviations_checked = checked;
            r.utility_delta = Some(p.unit.clone());
            r.notes.push(
                "the unit delta is an indicator: the constructive bid failed to place the transaction"
                    .into(),
            );
            r.witness = Some(Witness::Gap(GapWitness {
                description: format!(
                    "the threshold-beating bid {bid:?} left transaction {t} with list membership {:?} and block membership {}",
                    iv.lists, iv.block
                ),
                shortfall: p.unit.clone(),
            }));
            return Ok(r);
        }
    }

    let mut report = PropertyReport::new(kind, Verdict::Holds);
    report.deviations_checked = checked;
    report.notes.push(format!(
        "all {} excluded transactions found a bid landing in a list and the block",
        fair.len()
    ));
    report.witness = Some(Witness::FairBids(fair));
    Ok(report)
}

/// Confirms the prioritized mechanism's unfairness: with a positive producer
/// cost and a congested market, no bid on an extended grid places the target
/// in an inclusion list and the block at once.
pub fn check_single_prioritized_unfair(scenario: &Scenario) -> Result<PropertyReport> {
    scenario.validate()?;
    let p = &scenario.params;
    let kind = PropertyKind::NotFair;
    if scenario.tfm != TfmKind::SinglePrioritized {
        return Err(Error::UnsupportedMechanism {
            what: "the unfairness confirmation".into(),
            mechanism: format!("{:?}", scenario.tfm),
        });
    }
    if !p.mu_cost_bp.is_positive() {
        return Ok(PropertyReport::precondition(
            kind,
            "the producer's inclusion cost is zero",
        ));
    }
    if scenario.txs.len() <= p.c_block as usize {
        return Ok(PropertyReport::precondition(
            kind,
            format!(
                "not congested: {} transactions fit the {}-slot block",
                scenario.txs.len(),
                p.c_block
            ),
        ));
    }
    // Saturation hypothesis: when the target occupies a list slot, at most
    // c_block - 1 rivals can be listed alongside it, so 2 c_block - 1 rivals
    // covering the producer cost keep the block full of unlisted entries.
    let eligible_rivals = scenario
        .txs
        .iter()
        .filter(|t| t.id != scenario.target && t.bid.cap() >= &(&p.r + &p.mu_cost_bp))
        .count();
    let needed = 2 * p.c_block as usize - 1;
    if eligible_rivals < needed {
        return Ok(PropertyReport::precondition(
            kind,
            format!(
                "the rival competition cannot saturate the block: {eligible_rivals} bids cover the producer cost but the hypothesis needs {needed}"
            ),
        ));
    }

    let target = scenario.target;
    let mut caps: BTreeSet<Money> = BTreeSet::new();
    caps.insert(Money::zero());
    caps.insert(p.r.clone());
    caps.insert(&p.r + &p.mu_cost_bp);
    let mut max_fee = Money::zero();
    for t in scenario.txs.iter().filter(|t| t.id != target) {
        let fee = fee_total(&t.bid, p);
        max_fee = max_fee.max(fee.clone());
        for shift in [-1i64, 0, 1] {
            let level = (&fee + &p.unit * Money::from_int(shift)).clamp_zero();
            caps.insert(&p.r + &level / &p.s);
        }
    }
    caps.insert(&p.r + (&max_fee * Money::from_int(10)).max(p.unit.clone()) / &p.s);

    let mut listed_only = 0u64;
    let mut block_only = 0u64;
    let mut checked = 0u64;
    for cap in &caps {
        let mut m0 = scenario.txs.clone();
        let slot = m0.iter_mut().find(|x| x.id == target).expect("validated");
        slot.bid = Bid::SinglePrioritized { c: cap.clone() };
        slot.value = Some(cap.clone());
        let state = indicated_state(m0, p);
        checked += 1;
        let iv = inclusion_vector(&state, target);
        match (iv.in_any_list(), iv.block) {
            (true, true) => {
                let mut r = PropertyReport::new(kind, Verdict::Violated);
                r.deviations_checked = checked;
                r.utility_delta = Some(p.unit.clone());
                r.notes.push(
                    "the unit delta is an indicator: a bid achieved joint list and block inclusion"
                        .into(),
                );
                r.witness = Some(Witness::FairBids(vec![FairBidWitness {
                    tx: target,
                    bid: Bid::SinglePrioritized { c: cap.clone() },
                    list_order: iv.lists.iter().position(|x| *x).expect("listed") as u32 + 1,
                    in_block: true,
                }]));
                return Ok(r);
            }
            (true, false) => listed_only += 1,
            (false, true) => block_only += 1,
            (false, false) => {}
        }
    }

    let mut report = PropertyReport::new(kind, Verdict::Holds);
    report.deviations_checked = checked;
    report.notes.push(format!(
        "searched {checked} caps up to {}: the target was listed without the block {listed_only} times and included unlisted {block_only} times, never both",
        caps.iter().next_back().expect("nonempty"),
    ));
    Ok(report)
}

/// The properties meaningful for a mechanism.
pub fn default_properties(tfm: TfmKind) -> Vec<PropertyKind> {
    match tfm {
        TfmKind::Double | TfmKind::Single => vec![
            PropertyKind::Dsic,
            PropertyKind::Mcbn,
            PropertyKind::Mbbn,
            PropertyKind::CensorshipResistant,
            PropertyKind::FairUnderCongestion,
        ],
        TfmKind::SinglePrioritized => vec![
            PropertyKind::Mcbn,
            PropertyKind::Mbbn,
            PropertyKind::CensorshipResistant,
            PropertyKind::NotFair,
        ],
    }
}

/// Runs the selected property checks against one scenario.
pub fn run_checks(scenario: &Scenario, properties: &[PropertyKind]) -> Result<Vec<PropertyReport>> {
    properties
        .iter()
        .map(|k| match k {
            PropertyKind::Dsic => check_dsic(scenario, scenario.tfm),
            PropertyKind::Mcbn => {
                check_mcbn(scenario, &scenario.assignment, &scenario.beliefs, &scenario.space)
            }
            PropertyKind::Mbbn => check_mbbn(scenario, &scenario.assignment, &scenario.space),
            PropertyKind::CensorshipResistant => {
                check_censorship_resistance(scenario, scenario.tfm)
            }
            PropertyKind::FairUnderCongestion => {
                check_fair_under_congestion(scenario, scenario.tfm)
            }
            PropertyKind::NotFair => check_single_prioritized_unfair(scenario),
            PropertyKind::SimplifiedConsistency => Err(Error::InvalidParams(
                "the SimplifiedConsistency property runs on plant-free markets, not full scenarios"
                    .into(),
            )),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bribery::BeliefCm;
    use crate::core::{ListVariant, SenderVariant};
    use crate::scenario::{generate_batch, Regime};

    fn params(m: u32, c_block: u32, c_incl: u32) -> ScenarioParams {
        ScenarioParams {
            m,
            c_block,
            c_incl,
            s: Money::from_int(1),
            r: Money::from_int(1),
            gamma: Money::ratio(1, 2),
            mu_cost_cm: Money::zero(),
            mu_cost_bp: Money::zero(),
            z: Money::ratio(1, 2),
            unit: Money::from_int(1),
            lists: ListVariant::Conditional,
            senders: SenderVariant::MultiSender,
        }
    }

    fn double(id: u64, sender: &str, dcm: i64, dbp: i64) -> Transaction {
        let bid = Bid::Double {
            delta_cm: Money::from_int(dcm),
            delta_bp: Money::from_int(dbp),
            c: Money::from_int(dcm + dbp + 1),
        };
        Transaction::user(id, sender, Money::from_int(dcm + dbp + 4), bid)
    }

    fn bribery_scenario() -> Scenario {
        // Four transactions, three block slots, two includers of one slot
        // each: the committee ranking is 1 (cm 4), 2 (cm 3), 3 (cm 2), so
        // the target tx 1 is covered by includer 1.
        let p = params(2, 3, 1);
        let txs = vec![
            double(1, "a", 4, 2),
            double(2, "b", 3, 3),
            double(3, "c", 2, 4),
            double(4, "d", 1, 1),
        ];
        let mut assignment = TypeAssignment::uniform(2, BribeType::Cm3(Money::zero()), BribeType::Bp1);
        assignment.cm[0] = BribeType::Cm1;
        Scenario {
            beliefs: vec![BeliefCm::point_mass(&assignment)],
            assignment,
            params: p,
            tfm: TfmKind::Double,
            txs,
            target: TxId(1),
            space: StrategySpace::default(),
        }
    }

    #[test]
    fn dsic_holds_on_truthful_uncongested_markets() {
        let scenarios = generate_batch(11, TfmKind::Double, Regime::Dsic, 2).unwrap();
        for s in &scenarios {
            let r = check_dsic(s, TfmKind::Double).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.notes);
            assert!(r.utility_delta.unwrap() <= Money::zero());
        }
    }

    #[test]
    fn dsic_preconditions_gate_the_verdict() {
        let mut s = generate_batch(12, TfmKind::Single, Regime::Dsic, 1).unwrap().remove(0);
        s.txs[0].bid = Bid::Single {
            c: s.txs[0].value.clone().unwrap() + Money::from_int(1),
        };
        let r = check_dsic(&s, TfmKind::Single).unwrap();
        assert_eq!(r.verdict, Verdict::InconclusiveAtGrid);
        assert!(r.precondition_unmet.unwrap().contains("overbids"));
    }

    #[test]
    fn mcbn_holds_at_the_cap_and_breaks_one_unit_above() {
        let s = bribery_scenario();
        let r = check_mcbn(&s, &s.assignment, &s.beliefs, &s.space).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.notes);
        assert!(r.utility_delta.clone().unwrap() <= Money::zero());

        let mut bumped = s.clone();
        bumped.assignment.markup_cm = Money::from_int(1);
        let r2 = check_mcbn(&bumped, &bumped.assignment, &bumped.beliefs, &bumped.space).unwrap();
        assert_eq!(r2.verdict, Verdict::Violated, "{:?}", r2.notes);
        let delta = r2.utility_delta.clone().unwrap();
        assert!(delta.is_positive());
        match r2.witness.as_ref().unwrap() {
            Witness::Deviation(w) => {
                assert_eq!(replay_deviation(w, &bumped.params).unwrap(), delta);
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn mbbn_holds_at_the_cap_and_breaks_one_unit_above() {
        let s = bribery_scenario();
        let r = check_mbbn(&s, &s.assignment, &s.space).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.notes);

        let mut bumped = s.clone();
        bumped.assignment.markup_bp = Money::from_int(1);
        let r2 = check_mbbn(&bumped, &bumped.assignment, &bumped.space).unwrap();
        assert_eq!(r2.verdict, Verdict::Violated, "{:?}", r2.notes);
        let delta = r2.utility_delta.clone().unwrap();
        match r2.witness.as_ref().unwrap() {
            Witness::Deviation(w) => {
                assert_eq!(w.party, GameParty::BlockProducer);
                assert_eq!(replay_deviation(w, &bumped.params).unwrap(), delta);
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn censorship_resistance_splits_rules_from_the_fixture() {
        let s = bribery_scenario();
        let r = check_censorship_resistance(&s, TfmKind::Double).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);

        let r2 = check_policy_censorship_resistance(&BribeSwayedFixture, &s).unwrap();
        assert_eq!(r2.verdict, Verdict::Violated);
        assert!(r2.utility_delta.unwrap().is_positive());
    }

    #[test]
    fn fairness_constructs_winning_bids_when_congested() {
        for s in generate_batch(13, TfmKind::Double, Regime::Congested, 3).unwrap() {
            let r = check_fair_under_congestion(&s, TfmKind::Double).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.witness);
        }
        for s in generate_batch(14, TfmKind::Single, Regime::Congested, 3).unwrap() {
            let r = check_fair_under_congestion(&s, TfmKind::Single).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.witness);
        }
    }

    #[test]
    fn fairness_gates_and_degenerate_corners() {
        let s = generate_batch(15, TfmKind::Double, Regime::Dsic, 1).unwrap().remove(0);
        let r = check_fair_under_congestion(&s, TfmKind::Double).unwrap();
        assert_eq!(r.verdict, Verdict::InconclusiveAtGrid);
        assert!(r.precondition_unmet.is_some());

        let mut z0 = generate_batch(16, TfmKind::Single, Regime::Congested, 1).unwrap().remove(0);
        z0.params.z = Money::zero();
        z0.params.mu_cost_cm = Money::from_int(1);
        let r2 = check_fair_under_congestion(&z0, TfmKind::Single).unwrap();
        assert_eq!(r2.verdict, Verdict::Violated);
        assert_eq!(r2.utility_delta.unwrap(), Money::from_int(1));
    }

    #[test]
    fn prioritized_unfairness_confirmed_when_hypotheses_hold() {
        for s in generate_batch(17, TfmKind::SinglePrioritized, Regime::SpCongested, 3).unwrap() {
            let r = check_single_prioritized_unfair(&s).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.notes);
        }
        let mut s =
            generate_batch(18, TfmKind::SinglePrioritized, Regime::SpCongested, 1).unwrap().remove(0);
        s.params.mu_cost_bp = Money::zero();
        let r = check_single_prioritized_unfair(&s).unwrap();
        assert_eq!(r.verdict, Verdict::InconclusiveAtGrid);
    }

    #[test]
    fn reports_round_trip_through_json() {
        let s = bribery_scenario();
        let mut bumped = s.clone();
        bumped.assignment.markup_bp = Money::from_int(1);
        let r = check_mbbn(&bumped, &bumped.assignment, &bumped.space).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: PropertyReport = serde_json::from_str(&text).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn run_checks_covers_the_default_set() {
        let s = bribery_scenario();
        let reports = run_checks(&s, &default_properties(TfmKind::Double)).unwrap();
        assert_eq!(reports.len(), 5);
        assert!(reports.iter().all(|r| r.verdict != Verdict::Violated));
    }
}
