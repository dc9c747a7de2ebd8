//! Censorship bribes: the bribe families offered to includers and to the
//! block producer, the admissible type assignments, belief distributions
//! over types, and the bribe losses a party realizes in a final state.
//!
//! An external briber targets one transaction per scenario and offers each
//! party a payment for omitting it. Utilities book the bribe as a loss: a
//! party that carries the target forfeits the payment it would have
//! received. All bribe values derive from the original mempool's fee
//! rankings, never from a deviated state; the briber commits to the offer
//! before the game is played.

use serde::{Deserialize, Serialize};

use crate::core::{build_l_bp, build_l_cm, GameState, ScenarioParams, SenderVariant, Transaction, TxId};
use crate::money::Money;
use crate::{Error, Result};

/// One bribe offer. The committee offers (`Cm*`) pay an includer for
/// omitting the target from its list; the producer offers (`Bp1`, `FlatBp`)
/// pay for omitting it from the block. The flat variants are the simplified
/// model's abstract amounts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BribeType {
    /// Pays the committee cap on omission, unconditionally.
    Cm1,
    /// Pays the committee cap only if every party omitted the target.
    Cm2,
    /// Pays a flat amount on omission.
    Cm3(Money),
    /// Pays the producer cap on omission.
    Bp1,
    /// Simplified model: flat committee bribe.
    FlatCm(Money),
    /// Simplified model: flat producer bribe.
    FlatBp(Money),
}

impl BribeType {
    /// True for offers aimed at includers.
    pub fn is_committee(&self) -> bool {
        matches!(
            self,
            BribeType::Cm1 | BribeType::Cm2 | BribeType::Cm3(_) | BribeType::FlatCm(_)
        )
    }

    /// True for offers aimed at the block producer.
    pub fn is_producer(&self) -> bool {
        matches!(self, BribeType::Bp1 | BribeType::FlatBp(_))
    }

    /// Flat amounts must be non-negative.
    pub fn validate(&self) -> Result<()> {
        match self {
            BribeType::Cm3(x) | BribeType::FlatCm(x) | BribeType::FlatBp(x) => {
                if x.is_negative() {
                    Err(Error::InvalidScenario("negative bribe amount".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Short label used in reports and witness descriptions.
    pub fn name(&self) -> &'static str {
        match self {
            BribeType::Cm1 => "cm1",
            BribeType::Cm2 => "cm2",
            BribeType::Cm3(_) => "cm3",
            BribeType::Bp1 => "bp1",
            BribeType::FlatCm(_) => "flat_cm",
            BribeType::FlatBp(_) => "flat_bp",
        }
    }
}

/// The realized bribe types of every party, plus optional markups that raise
/// the formula-valued offers (`Cm1`, `Cm2`, `Bp1`) above their caps; the
/// tightness checks use a markup of one unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeAssignment {
    pub bp: BribeType,
    /// One committee type per includer, in order.
    pub cm: Vec<BribeType>,
    #[serde(default, skip_serializing_if = "Money::is_zero")]
    pub markup_cm: Money,
    #[serde(default, skip_serializing_if = "Money::is_zero")]
    pub markup_bp: Money,
}

impl TypeAssignment {
    /// Every includer gets `cm`, the producer gets `bp`, no markups.
    pub fn uniform(m: u32, cm: BribeType, bp: BribeType) -> TypeAssignment {
        TypeAssignment {
            bp,
            cm: vec![cm; m as usize],
            markup_cm: Money::zero(),
            markup_bp: Money::zero(),
        }
    }

    /// Party-side and amount checks, plus the admissibility constraint that
    /// the critical-order includer (the one whose list slice covers the
    /// target) has a type that reacts to the target, `Cm1` or `Cm2`.
    pub fn validate(&self, m: u32, critical: Option<u32>) -> Result<()> {
        if self.cm.len() != m as usize {
            return Err(Error::InvalidScenario(
                "type assignment must cover every includer".into(),
            ));
        }
        if !self.bp.is_producer() {
            return Err(Error::BribeParty {
                bribe: self.bp.name().into(),
                party: "block producer".into(),
            });
        }
        self.bp.validate()?;
        for (i, ty) in self.cm.iter().enumerate() {
            if !ty.is_committee() {
                return Err(Error::BribeParty {
                    bribe: ty.name().into(),
                    party: format!("includer {}", i + 1),
                });
            }
            ty.validate()?;
        }
        if self.markup_cm.is_negative() || self.markup_bp.is_negative() {
            return Err(Error::InvalidScenario("negative bribe markup".into()));
        }
        if let Some(j) = critical {
            match self.cm.get(j as usize - 1) {
                Some(BribeType::Cm1) | Some(BribeType::Cm2) => {}
                _ => {
                    return Err(Error::InvalidScenario(format!(
                        "includer {j} covers the target's list slice and must have type cm1 or cm2"
                    )))
                }
            }
        }
        Ok(())
    }
}

/// One weighted type in a belief marginal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefEntry {
    #[serde(rename = "type")]
    pub bribe: BribeType,
    pub probability: Money,
}

/// A product distribution over the includers' committee types. The
/// producer's type is common knowledge (`Bp1` in the standard scenarios), so
/// no marginal is kept for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefCm {
    /// `marginals[j - 1]` is the distribution over includer `j`'s type.
    pub marginals: Vec<Vec<BeliefEntry>>,
}

impl BeliefCm {
    /// The degenerate belief that puts probability one on `assignment`.
    pub fn point_mass(assignment: &TypeAssignment) -> BeliefCm {
        BeliefCm {
            marginals: assignment
                .cm
                .iter()
                .map(|ty| {
                    vec![BeliefEntry {
                        bribe: ty.clone(),
                        probability: Money::from_int(1),
                    }]
                })
                .collect(),
        }
    }

    /// Exact-sum and support checks. The critical-order includer's support
    /// must stay inside {`Cm1`, `Cm2`}.
    pub fn validate(&self, m: u32, critical: Option<u32>) -> Result<()> {
        if self.marginals.len() != m as usize {
            return Err(Error::InvalidScenario(
                "belief must have one marginal per includer".into(),
            ));
        }
        for (i, marginal) in self.marginals.iter().enumerate() {
            let mut total = Money::zero();
            for entry in marginal {
                if !entry.bribe.is_committee() {
                    return Err(Error::BribeParty {
                        bribe: entry.bribe.name().into(),
                        party: format!("includer {}", i + 1),
                    });
                }
                entry.bribe.validate()?;
                if entry.probability.is_negative() {
                    return Err(Error::InvalidScenario("negative probability".into()));
                }
                if critical == Some(i as u32 + 1)
                    && !matches!(entry.bribe, BribeType::Cm1 | BribeType::Cm2)
                {
                    return Err(Error::InvalidScenario(format!(
                        "belief support for critical includer {} must be cm1 or cm2",
                        i + 1
                    )));
                }
                total += &entry.probability;
            }
            if total != Money::from_int(1) {
                return Err(Error::BadDistribution(total));
            }
        }
        Ok(())
    }

    /// All joint type vectors with their product probabilities, skipping the
    /// marginal of includer `skip` (the party whose own type is fixed).
    /// Skipped slots carry `None`.
    pub fn type_vectors(&self, skip: Option<u32>) -> Vec<(Vec<Option<BribeType>>, Money)> {
        let mut vectors = vec![(Vec::new(), Money::from_int(1))];
        for (i, marginal) in self.marginals.iter().enumerate() {
            if skip == Some(i as u32 + 1) {
                for (v, _) in &mut vectors {
                    v.push(None);
                }
                continue;
            }
            let mut next = Vec::with_capacity(vectors.len() * marginal.len());
            for (v, prob) in &vectors {
                for entry in marginal {
                    let mut v2 = v.clone();
                    v2.push(Some(entry.bribe.clone()));
                    next.push((v2, prob * &entry.probability));
                }
            }
            vectors = next;
        }
        vectors
    }
}

/// The first committee-ranking position after the slice of the includer
/// whose lists cover position `o`: `c_incl * ceil(o / c_incl) + 1`.
pub fn next_slice_position(o: usize, c_incl: u32) -> usize {
    let c = c_incl as usize;
    c * o.div_ceil(c) + 1
}

/// The order of the includer whose indicated list slice covers the target:
/// `ceil(o / c_incl)` for the target's committee position `o`. Errors when
/// the target sits outside the first `min(m * c_incl, |L_CM|)` positions,
/// where no includer would list it.
pub fn critical_order(m0: &[Transaction], target: TxId, p: &ScenarioParams) -> Result<u32> {
    let l_cm = build_l_cm(m0, p);
    let o = l_cm
        .position(target)
        .ok_or_else(|| Error::TargetNotReachable(target, "the committee ranking".into()))?;
    let reach = ((p.m * p.c_incl) as usize).min(l_cm.len());
    if o > reach {
        return Err(Error::TargetNotReachable(
            target,
            format!("the first {reach} committee positions"),
        ));
    }
    Ok(o.div_ceil(p.c_incl as usize) as u32)
}

fn cm_cap(target: TxId, m0: &[Transaction], p: &ScenarioParams) -> Result<Money> {
    let l_cm = build_l_cm(m0, p);
    let o = l_cm
        .position(target)
        .ok_or_else(|| Error::TargetNotReachable(target, "the committee ranking".into()))?;
    let f_cm = l_cm.fee_at(o);
    let g = next_slice_position(o, p.c_incl);
    Ok(f_cm - l_cm.fee_at(g).max(p.mu_cm_fee()))
}

/// The committee bribe paid to an includer that omits the target.
///
/// `Cm1` and `Cm2` pay the cap `f_CM - max(f_g, mu_cost_cm * s)`, with `g`
/// the first position after the critical includer's slice; `Cm2` pays only
/// when `all_omitted` (no other party carried the target). `Cm3` pays its
/// flat amount. Producer offers error.
pub fn bribe_cm_value(
    ty: &BribeType,
    target: TxId,
    m0: &[Transaction],
    p: &ScenarioParams,
    all_omitted: bool,
) -> Result<Money> {
    match ty {
        BribeType::Cm1 => cm_cap(target, m0, p),
        BribeType::Cm2 => {
            let cap = cm_cap(target, m0, p)?;
            Ok(if all_omitted { cap } else { Money::zero() })
        }
        BribeType::Cm3(x) | BribeType::FlatCm(x) => Ok(x.clone()),
        BribeType::Bp1 | BribeType::FlatBp(_) => Err(Error::BribeParty {
            bribe: ty.name().into(),
            party: "an includer".into(),
        }),
    }
}

/// The four candidate upper bounds on the producer bribe in the uncongested
/// case, and their minimum. Congested scenarios have a single closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BpBribeBound {
    /// True when `|M0| > c_block`.
    pub congested: bool,
    /// The bound itself: the congested closed form, or the minimum of the
    /// four uncongested terms.
    pub value: Money,
    /// Omit the target and fill the block with plants (uncongested only).
    pub omit_and_fill: Option<Money>,
    /// Forfeit the whole block's producer surplus.
    pub forfeit_block: Money,
    /// Plant mempool fakes that push the target out of the producer window,
    /// then invalidate them (uncongested only).
    pub displace_producer: Option<Money>,
    /// Plant mempool fakes that push the target out of every list slice,
    /// then invalidate them (uncongested only).
    pub displace_committee: Option<Money>,
}

/// The producer bribe bound for omitting the target.
///
/// Congested (`|M0| > c_block`): `f_BP - max(f_{c_block+1,BP}, mu_cost_bp*s)`.
/// Uncongested: the minimum over the four deviation routes in
/// [`BpBribeBound`]. Errors when the target is missing from the rankings the
/// formulas read.
pub fn bribe_bp_terms(target: TxId, m0: &[Transaction], p: &ScenarioParams) -> Result<BpBribeBound> {
    let l_bp = build_l_bp(m0, p);
    let o_bp = l_bp
        .position(target)
        .ok_or_else(|| Error::TargetNotReachable(target, "the producer ranking".into()))?;
    let f_bp = l_bp.fee_at(o_bp);
    let w = m0.len();
    let window = (p.c_block as usize).min(l_bp.len());
    let forfeit_block: Money = (1..=window)
        .map(|j| l_bp.fee_at(j) - p.mu_bp_fee())
        .sum();

    if w > p.c_block as usize {
        let next = l_bp.fee_at(p.c_block as usize + 1);
        return Ok(BpBribeBound {
            congested: true,
            value: f_bp - next.max(p.mu_bp_fee()),
            omit_and_fill: None,
            forfeit_block,
            displace_producer: None,
            displace_committee: None,
        });
    }

    let l_cm = build_l_cm(m0, p);
    let o = l_cm
        .position(target)
        .ok_or_else(|| Error::TargetNotReachable(target, "the committee ranking".into()))?;
    let reach = ((p.m * p.c_incl) as usize).min(l_cm.len());
    if o > reach {
        return Err(Error::TargetNotReachable(
            target,
            format!("the first {reach} committee positions"),
        ));
    }
    let f_cm = l_cm.fee_at(o);
    let margin = &f_bp - &p.mu_bp_fee();
    let burn = p.burn();
    let m = p.m as usize;

    let fill_count = p.c_block as usize - w + 1;
    let omit_and_fill = &margin + &burn * Money::from_count(fill_count);

    let k_bp = p.c_block as usize - o_bp + 1;
    let q = reach - o + 1;
    let (k1, k2) = match p.senders {
        SenderVariant::UniqueSender => (k_bp.div_ceil(m), q.div_ceil(m)),
        SenderVariant::MultiSender => (1, 1),
    };
    let displace_producer =
        &margin + &p.gamma * Money::from_count(k_bp) * &f_bp + &burn * Money::from_count(k1);
    let y = p.c_block as usize - q + 1;
    let displace_committee = &margin
        + &p.gamma
            * Money::from_count(q)
            * (&f_cm + l_bp.fee_at(y).max(p.mu_bp_fee()))
        + &burn * Money::from_count(k2);

    let value = omit_and_fill
        .clone()
        .min(forfeit_block.clone())
        .min(displace_producer.clone())
        .min(displace_committee.clone());
    Ok(BpBribeBound {
        congested: false,
        value,
        omit_and_fill: Some(omit_and_fill),
        forfeit_block,
        displace_producer: Some(displace_producer),
        displace_committee: Some(displace_committee),
    })
}

/// The producer bribe bound alone; see [`bribe_bp_terms`].
pub fn bribe_bp_value(target: TxId, m0: &[Transaction], p: &ScenarioParams) -> Result<Money> {
    Ok(bribe_bp_terms(target, m0, p)?.value)
}

/// The cap quoted for the stronger bribe notion that quantifies over every
/// producer strategy at once: `f_BP - mu_cost_bp * s` when uncongested. Not
/// used by the best-response checks; exposed for reporting only. Congested
/// scenarios fall back to the congested closed form, where the two notions
/// coincide.
pub fn bribe_bp_value_mbic_cap(
    target: TxId,
    m0: &[Transaction],
    p: &ScenarioParams,
) -> Result<Money> {
    let l_bp = build_l_bp(m0, p);
    let o_bp = l_bp
        .position(target)
        .ok_or_else(|| Error::TargetNotReachable(target, "the producer ranking".into()))?;
    if m0.len() > p.c_block as usize {
        return bribe_bp_value(target, m0, p);
    }
    Ok(l_bp.fee_at(o_bp) - p.mu_bp_fee())
}

/// A party that can be offered a censorship bribe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Includer(u32),
    BlockProducer,
}

/// The bribe income `party` forfeits in `state` by carrying `target`.
///
/// An includer whose list holds the target forfeits its committee offer (for
/// `Cm2` only when every other party omitted it, so the loss equals the
/// payment the omission would have earned with the others' play fixed); the
/// producer whose block holds it forfeits its producer offer. All values are
/// computed from the genuine mempool `state.m0` and raised by the
/// assignment's markup for the formula-valued offers.
pub fn bribe_loss(
    party: Party,
    state: &GameState,
    assignment: &TypeAssignment,
    target: TxId,
    p: &ScenarioParams,
) -> Result<Money> {
    match party {
        Party::Includer(j) => {
            let ty = assignment.cm.get(j as usize - 1).ok_or_else(|| {
                Error::InvalidScenario(format!("no type assigned to includer {j}"))
            })?;
            let list = state.lists.get(j as usize - 1).ok_or_else(|| {
                Error::InvalidScenario(format!("no list published by includer {j}"))
            })?;
            if !list.contains(&target) {
                return Ok(Money::zero());
            }
            let all_others_omitted = !state.block.contains(&target)
                && state
                    .lists
                    .iter()
                    .enumerate()
                    .all(|(i, l)| i == j as usize - 1 || !l.contains(&target));
            let value = bribe_cm_value(ty, target, &state.m0, p, all_others_omitted)?;
            let markup = match ty {
                BribeType::Cm1 => assignment.markup_cm.clone(),
                BribeType::Cm2 if all_others_omitted => assignment.markup_cm.clone(),
                _ => Money::zero(),
            };
            Ok(value + markup)
        }
        Party::BlockProducer => {
            if !state.block.contains(&target) {
                return Ok(Money::zero());
            }
            match &assignment.bp {
                BribeType::Bp1 => {
                    Ok(bribe_bp_value(target, &state.m0, p)? + &assignment.markup_bp)
                }
                BribeType::FlatBp(b) => Ok(b.clone()),
                other => Err(Error::BribeParty {
                    bribe: other.name().into(),
                    party: "block producer".into(),
                }),
            }
        }
    }
}

/// The default flat-amount grid for `Cm3` types: `{0, f/2, f, 2f, 10f}`
/// around the target's committee fee `f`, deduplicated.
pub fn default_x_grid(f_cm: &Money) -> Vec<Money> {
    let mut grid = vec![
        Money::zero(),
        f_cm * Money::ratio(1, 2),
        f_cm.clone(),
        f_cm * Money::from_int(2),
        f_cm * Money::from_int(10),
    ];
    grid.sort();
    grid.dedup();
    grid
}

/// Every committee type an includer of order `order` may have: the critical
/// order reacts to the target (`Cm1`/`Cm2`); every other order may also hold
/// a flat offer from the grid.
pub fn admissible_cm_types(order: u32, critical: u32, x_grid: &[Money]) -> Vec<BribeType> {
    let mut types = vec![BribeType::Cm1, BribeType::Cm2];
    if order != critical {
        types.extend(x_grid.iter().cloned().map(BribeType::Cm3));
    }
    types
}
