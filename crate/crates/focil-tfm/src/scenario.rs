//! Scenario descriptors and seeded random generation of check inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::analysis::SimplifiedScenario;
use crate::bribery::{critical_order, BeliefCm, BeliefEntry, BribeType, TypeAssignment};
use crate::core::{
    Bid, ListVariant, Origin, ScenarioParams, SenderVariant, TfmKind, Transaction, TxId,
};
use crate::equilibrium::StrategySpace;
use crate::money::Money;
use crate::tfm::recommended_bid;
use crate::{Error, Result};

/// A complete check input: mechanism, market, bribes, and search bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub params: ScenarioParams,
    pub tfm: TfmKind,
    /// The genuine mempool: user transactions only.
    pub txs: Vec<Transaction>,
    /// The transaction the briber wants censored.
    pub target: TxId,
    /// Realized bribe types of the committee and the producer.
    pub assignment: TypeAssignment,
    /// Common-knowledge beliefs over committee types; the checks verify the
    /// expected utilities agree across all of them.
    pub beliefs: Vec<BeliefCm>,
    /// Deviation-search bounds.
    #[serde(default)]
    pub space: StrategySpace,
}

impl Scenario {
    /// Structural validation of every component.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.txs.is_empty() {
            return Err(Error::InvalidScenario("empty mempool".into()));
        }
        let mut ids = BTreeSet::new();
        let mut senders = BTreeSet::new();
        for t in &self.txs {
            if t.origin != Origin::User {
                return Err(Error::InvalidScenario(format!(
                    "mempool transaction {} is not user-originated",
                    t.id
                )));
            }
            match &t.value {
                None => {
                    return Err(Error::InvalidScenario(format!(
                        "user transaction {} carries no value",
                        t.id
                    )))
                }
                Some(v) if v.is_negative() => {
                    return Err(Error::InvalidScenario(format!(
                        "user transaction {} has a negative value",
                        t.id
                    )))
                }
                Some(_) => {}
            }
            if t.bid.kind() != self.tfm {
                return Err(Error::InvalidScenario(format!(
                    "transaction {} bids under a different mechanism",
                    t.id
                )));
            }
            t.bid.validate()?;
            if t.invalidates.is_some() {
                return Err(Error::InvalidScenario(format!(
                    "user transaction {} claims to invalidate another",
                    t.id
                )));
            }
            if !ids.insert(t.id) {
                return Err(Error::InvalidScenario(format!(
                    "duplicate transaction id {}",
                    t.id
                )));
            }
            if !senders.insert(t.sender.clone())
                && self.params.senders == SenderVariant::UniqueSender
            {
                return Err(Error::InvalidScenario(format!(
                    "duplicate sender under unique-sender rules ({})",
                    t.id
                )));
            }
        }
        if !ids.contains(&self.target) {
            return Err(Error::UnknownTx(self.target));
        }
        self.assignment.validate(self.params.m, None)?;
        if self.beliefs.is_empty() {
            return Err(Error::InvalidScenario(
                "at least one belief is required".into(),
            ));
        }
        for b in &self.beliefs {
            b.validate(self.params.m, None)?;
        }
        self.space.validate()?;
        Ok(())
    }
}

/// A family of generated scenarios sharing a structural guarantee.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Uncongested, truthful-range bids: the dominant-strategy preconditions
    /// hold by construction.
    Dsic,
    /// The target is reachable by some inclusion list and carries formula
    /// bribes at their caps; congestion varies.
    Bribery,
    /// More transactions than block space: the fairness hypothesis holds.
    Congested,
    /// Congested prioritized market with a positive producer cost: the
    /// unfairness hypothesis holds.
    SpCongested,
}

impl Regime {
    /// The regime's name as written in CLI arguments.
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Dsic => "dsic",
            Regime::Bribery => "bribery",
            Regime::Congested => "congested",
            Regime::SpCongested => "sp_congested",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Regime> {
        match s {
            "dsic" => Ok(Regime::Dsic),
            "bribery" => Ok(Regime::Bribery),
            "congested" => Ok(Regime::Congested),
            "sp_congested" | "sp-congested" => Ok(Regime::SpCongested),
            other => Err(Error::InvalidParams(format!("unknown regime {other:?}"))),
        }
    }
}

fn money_range(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Money {
    Money::from_int(rng.random_range(lo..=hi))
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, options: &[T]) -> T {
    options[rng.random_range(0..options.len())].clone()
}

fn base_params(rng: &mut ChaCha8Rng) -> ScenarioParams {
    ScenarioParams {
        m: rng.random_range(2..=3),
        c_block: 3,
        c_incl: rng.random_range(1..=2),
        s: Money::from_int(1),
        r: money_range(rng, 0, 2),
        gamma: pick(rng, &[Money::zero(), Money::ratio(1, 2), Money::from_int(1)]),
        mu_cost_cm: money_range(rng, 0, 1),
        mu_cost_bp: money_range(rng, 0, 1),
        z: Money::ratio(1, 2),
        unit: Money::from_int(1),
        lists: ListVariant::Conditional,
        senders: SenderVariant::MultiSender,
    }
}

fn double_bid(rng: &mut ChaCha8Rng, p: &ScenarioParams, max_premium: i64) -> Bid {
    let delta_cm = &p.mu_cost_cm + money_range(rng, 0, max_premium);
    let delta_bp = &p.mu_cost_bp + money_range(rng, 0, max_premium);
    let c = &p.r + &delta_cm + &delta_bp;
    Bid::Double { delta_cm, delta_bp, c }
}

fn premium_bid(rng: &mut ChaCha8Rng, tfm: TfmKind, p: &ScenarioParams, max_premium: i64) -> Bid {
    match tfm {
        TfmKind::Double => double_bid(rng, p, max_premium),
        TfmKind::Single => Bid::Single {
            c: &p.r + &p.mu_cost_bp + money_range(rng, 1, max_premium.max(1)),
        },
        TfmKind::SinglePrioritized => Bid::SinglePrioritized {
            c: &p.r + &p.mu_cost_bp + money_range(rng, 1, max_premium.max(1)),
        },
    }
}

fn user_txs(rng: &mut ChaCha8Rng, tfm: TfmKind, p: &ScenarioParams, n: usize) -> Vec<Transaction> {
    (1..=n)
        .map(|i| {
            let bid = premium_bid(rng, tfm, p, 4);
            let value = bid.cap() + money_range(rng, 0, 3);
            Transaction::user(i as u64, &format!("u{i}"), value, bid)
        })
        .collect()
}

fn flat_assignment(m: u32) -> TypeAssignment {
    TypeAssignment::uniform(m, BribeType::FlatCm(Money::zero()), BribeType::FlatBp(Money::zero()))
}

fn point_beliefs(assignment: &TypeAssignment) -> Vec<BeliefCm> {
    vec![BeliefCm::point_mass(assignment)]
}

/// Three beliefs agreeing on support admissibility but not on weights, used
/// to confirm expected utilities do not depend on the belief.
fn spread_beliefs(assignment: &TypeAssignment, critical: u32) -> Vec<BeliefCm> {
    let point = BeliefCm::point_mass(assignment);
    let mut mixed = point.clone();
    mixed.marginals[critical as usize - 1] = vec![
        BeliefEntry { bribe: BribeType::Cm1, probability: Money::ratio(1, 2) },
        BeliefEntry { bribe: BribeType::Cm2, probability: Money::ratio(1, 2) },
    ];
    let mut skewed = mixed.clone();
    skewed.marginals[critical as usize - 1] = vec![
        BeliefEntry { bribe: BribeType::Cm1, probability: Money::ratio(1, 3) },
        BeliefEntry { bribe: BribeType::Cm2, probability: Money::ratio(2, 3) },
    ];
    for (i, marginal) in skewed.marginals.iter_mut().enumerate() {
        if i != critical as usize - 1 {
            if let BribeType::Cm3(x) = &assignment.cm[i] {
                *marginal = vec![
                    BeliefEntry {
                        bribe: BribeType::Cm3(x.clone()),
                        probability: Money::ratio(3, 4),
                    },
                    BeliefEntry {
                        bribe: BribeType::Cm3(x + Money::from_int(1)),
                        probability: Money::ratio(1, 4),
                    },
                ];
            }
        }
    }
    vec![point, mixed, skewed]
}

fn try_dsic(rng: &mut ChaCha8Rng, tfm: TfmKind) -> Result<Scenario> {
    let mut p = base_params(rng);
    p.c_block = rng.random_range(3..=5);
    p.r = money_range(rng, 1, 2);
    let n = rng.random_range(2..=(p.c_block as usize - 1).min(4));
    let txs: Vec<Transaction> = (1..=n)
        .map(|i| {
            let value = &p.r + &p.mu_cost_bp + money_range(rng, 0, 5);
            let bid = if rng.random_bool(0.5) {
                recommended_bid(tfm, &value, &p)?
            } else {
                // A random bid capped at the value, so nobody overbids.
                match tfm {
                    TfmKind::Double => {
                        let c = Money::from_int(rng.random_range(0..=6)).min(value.clone());
                        let delta_cm = Money::from_int(rng.random_range(0..=3)).min(c.clone());
                        let delta_bp = Money::from_int(rng.random_range(0..=3)).min(c.clone());
                        Bid::Double { delta_cm, delta_bp, c }
                    }
                    TfmKind::Single => Bid::Single {
                        c: Money::from_int(rng.random_range(0..=6)).min(value.clone()),
                    },
                    TfmKind::SinglePrioritized => unreachable!("rejected above"),
                }
            };
            Ok(Transaction::user(i as u64, &format!("u{i}"), value, bid))
        })
        .collect::<Result<_>>()?;
    // The default check set runs the bribery properties too, so the target
    // must be reachable; an Err here rejects the draw.
    critical_order(&txs, txs[0].id, &p)?;
    let assignment = flat_assignment(p.m);
    Ok(Scenario {
        target: txs[0].id,
        beliefs: point_beliefs(&assignment),
        assignment,
        params: p,
        tfm,
        txs,
        space: StrategySpace::default(),
    })
}

fn try_bribery(rng: &mut ChaCha8Rng, tfm: TfmKind) -> Result<Scenario> {
    let mut p = base_params(rng);
    let congested = rng.random_bool(0.5);
    p.c_block = if congested { rng.random_range(2..=3) } else { 3 };
    if rng.random_bool(0.25) {
        p.senders = SenderVariant::UniqueSender;
    }
    let n = if congested {
        p.c_block as usize + rng.random_range(1..=2)
    } else {
        rng.random_range(2..=p.c_block as usize)
    };
    let txs = user_txs(rng, tfm, &p, n);
    // The target must sit in some includer's slice of the committee ranking.
    let reachable: Vec<TxId> = txs
        .iter()
        .map(|t| t.id)
        .filter(|id| critical_order(&txs, *id, &p).is_ok())
        .collect();
    if reachable.is_empty() {
        return Err(Error::InvalidScenario("no listable target".into()));
    }
    let target = reachable[rng.random_range(0..reachable.len())];
    let critical = critical_order(&txs, target, &p)?;
    let mut assignment = TypeAssignment::uniform(
        p.m,
        BribeType::Cm3(money_range(rng, 0, 3)),
        if rng.random_bool(0.8) {
            BribeType::Bp1
        } else {
            BribeType::FlatBp(money_range(rng, 0, 2))
        },
    );
    assignment.cm[critical as usize - 1] = if rng.random_bool(0.5) {
        BribeType::Cm1
    } else {
        BribeType::Cm2
    };
    Ok(Scenario {
        beliefs: spread_beliefs(&assignment, critical),
        assignment,
        params: p,
        tfm,
        txs,
        target,
        space: StrategySpace::default(),
    })
}

fn try_congested(rng: &mut ChaCha8Rng, tfm: TfmKind) -> Result<Scenario> {
    let mut p = base_params(rng);
    p.c_block = rng.random_range(2..=3);
    p.z = pick(rng, &[Money::ratio(1, 4), Money::ratio(1, 2), Money::ratio(3, 4)]);
    let n = p.c_block as usize + rng.random_range(1..=2);
    let txs = user_txs(rng, tfm, &p, n);
    critical_order(&txs, txs[n - 1].id, &p)?;
    let assignment = flat_assignment(p.m);
    Ok(Scenario {
        target: txs[n - 1].id,
        beliefs: point_beliefs(&assignment),
        assignment,
        params: p,
        tfm,
        txs,
        space: StrategySpace::default(),
    })
}

fn try_sp_congested(rng: &mut ChaCha8Rng) -> Result<Scenario> {
    let mut p = base_params(rng);
    p.c_block = 2;
    p.mu_cost_bp = money_range(rng, 1, 2);
    // Saturation: rivals covering the producer cost must outnumber the block
    // and the committee window combined, so a listed target never rides a
    // spare slot into the block.
    let n = 2 * p.c_block as usize + rng.random_range(0..=1);
    let txs = user_txs(rng, TfmKind::SinglePrioritized, &p, n);
    critical_order(&txs, txs[n - 1].id, &p)?;
    let assignment = flat_assignment(p.m);
    Ok(Scenario {
        target: txs[n - 1].id,
        beliefs: point_beliefs(&assignment),
        assignment,
        params: p,
        tfm: TfmKind::SinglePrioritized,
        txs,
        space: StrategySpace::default(),
    })
}

/// Generates `n` validated scenarios of the given regime, deterministically
/// from the seed. Rejection-samples until each scenario meets the regime's
/// structural guarantee.
pub fn generate_batch(seed: u64, tfm: TfmKind, regime: Regime, n: usize) -> Result<Vec<Scenario>> {
    match regime {
        Regime::Dsic if tfm == TfmKind::SinglePrioritized => {
            return Err(Error::UnsupportedMechanism {
                what: "a truthful-bidding regime".into(),
                mechanism: "the prioritized mechanism".into(),
            })
        }
        Regime::SpCongested if tfm != TfmKind::SinglePrioritized => {
            return Err(Error::InvalidParams(
                "the sp_congested regime requires the prioritized mechanism".into(),
            ))
        }
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0u32;
    while out.len() < n {
        attempts += 1;
        if attempts > 400 * n as u32 {
            return Err(Error::GenerationFailed {
                attempts,
                reason: format!("no valid {} scenario found", regime.name()),
            });
        }
        let candidate = match regime {
            Regime::Dsic => try_dsic(&mut rng, tfm),
            Regime::Bribery => try_bribery(&mut rng, tfm),
            Regime::Congested => try_congested(&mut rng, tfm),
            Regime::SpCongested => try_sp_congested(&mut rng),
        };
        let scenario = match candidate {
            Ok(s) => s,
            Err(_) => continue,
        };
        if scenario.validate().is_ok() {
            out.push(scenario);
        }
    }
    Ok(out)
}

/// Generates `n` plant-free markets, deterministically from the seed,
/// spanning both list variants and both congestion directions.
pub fn generate_simplified_batch(seed: u64, n: usize) -> Vec<SimplifiedScenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let m = rng.random_range(1..=3u32);
        let sc = SimplifiedScenario {
            m,
            c_block: rng.random_range(1..=4),
            c_incl: rng.random_range(1..=2),
            w: rng.random_range(1..=6),
            s: Money::from_int(1),
            r: money_range(&mut rng, 0, 2),
            f_cm: money_range(&mut rng, 0, 4),
            f_bp: money_range(&mut rng, 0, 4),
            block_rewards: money_range(&mut rng, 0, 10),
            conditional: rng.random_bool(0.5),
            bribe_bp: money_range(&mut rng, 0, 8),
            bribe_cm: (0..m).map(|_| money_range(&mut rng, 0, 4)).collect(),
        };
        if sc.validate().is_ok() {
            out.push(sc);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = generate_batch(7, TfmKind::Double, Regime::Bribery, 4).unwrap();
        let b = generate_batch(7, TfmKind::Double, Regime::Bribery, 4).unwrap();
        assert_eq!(a, b);
        let c = generate_batch(8, TfmKind::Double, Regime::Bribery, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn regimes_deliver_their_guarantees() {
        for s in generate_batch(1, TfmKind::Double, Regime::Dsic, 6).unwrap() {
            let eligible = s
                .txs
                .iter()
                .filter(|t| t.value.as_ref().unwrap() >= &s.params.r)
                .count();
            assert!(eligible < s.params.c_block as usize);
            for t in &s.txs {
                assert!(t.bid.cap() <= t.value.as_ref().unwrap(), "no overbidding");
            }
        }
        for s in generate_batch(2, TfmKind::Single, Regime::Bribery, 6).unwrap() {
            assert!(critical_order(&s.txs, s.target, &s.params).is_ok());
            assert_eq!(s.beliefs.len(), 3);
        }
        for s in generate_batch(3, TfmKind::Double, Regime::Congested, 6).unwrap() {
            assert!(s.txs.len() > s.params.c_block as usize);
        }
        for s in generate_batch(4, TfmKind::SinglePrioritized, Regime::SpCongested, 6).unwrap() {
            assert!(s.params.mu_cost_bp.is_positive());
            assert!(s.txs.len() > s.params.c_block as usize);
        }
    }

    #[test]
    fn incompatible_regime_and_mechanism_error() {
        assert!(generate_batch(1, TfmKind::SinglePrioritized, Regime::Dsic, 1).is_err());
        assert!(generate_batch(1, TfmKind::Double, Regime::SpCongested, 1).is_err());
    }

    #[test]
    fn validation_rejects_foreign_bids_and_unknown_targets() {
        let mut s = generate_batch(5, TfmKind::Double, Regime::Bribery, 1).unwrap().remove(0);
        s.target = TxId(999);
        assert!(matches!(s.validate(), Err(Error::UnknownTx(_))));

        let mut s2 = generate_batch(5, TfmKind::Double, Regime::Bribery, 1).unwrap().remove(0);
        s2.txs[0].bid = Bid::Single { c: Money::from_int(3) };
        assert!(s2.validate().is_err());
    }
}
