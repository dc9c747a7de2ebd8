//! Censorship-cost analytics: minimum bribes, the committee-share
//! optimizer, and the plant-free bribery bounds for both list variants.

use serde::{Deserialize, Serialize};

use crate::bribery::{bribe_bp_value, bribe_cm_value, critical_order, BribeType};
use crate::core::{TfmKind, TxId};
use crate::equilibrium::{GapWitness, PropertyKind, PropertyReport, Verdict, Witness};
use crate::money::Money;
use crate::scenario::Scenario;
use crate::{Error, Result};

/// The analytic price of producer-side censorship for the scenario's
/// target: delegates to the bribe formula after confirming the mechanism.
pub fn min_bribe_bp(scenario: &Scenario, tfm: TfmKind) -> Result<Money> {
    scenario.validate()?;
    if tfm != scenario.tfm {
        return Err(Error::InvalidScenario(
            "the mechanism argument disagrees with the scenario".into(),
        ));
    }
    bribe_bp_value(scenario.target, &scenario.txs, &scenario.params)
}

/// Minimum omission bribes for one scenario's target, by party.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinBribeReport {
    pub target: TxId,
    /// The list order whose holder decides the target's committee payment,
    /// when one exists.
    pub critical_order: Option<u32>,
    /// Committee-side minimum when every other list also omits the target.
    pub committee: Option<Money>,
    /// Producer-side minimum.
    pub producer: Option<Money>,
    pub notes: Vec<String>,
}

/// Computes the minimum omission bribes for the scenario's target; a side
/// the target never reaches needs no bribe and reports `None` with a note.
pub fn min_bribes(scenario: &Scenario) -> Result<MinBribeReport> {
    scenario.validate()?;
    let p = &scenario.params;
    let mut report = MinBribeReport {
        target: scenario.target,
        critical_order: None,
        committee: None,
        producer: None,
        notes: Vec::new(),
    };
    match critical_order(&scenario.txs, scenario.target, p) {
        Ok(order) => {
            report.critical_order = Some(order);
            report.committee = Some(bribe_cm_value(
                &BribeType::Cm1,
                scenario.target,
                &scenario.txs,
                p,
                true,
            )?);
        }
        Err(_) => report.notes.push(
            "the target never reaches the committee ranking's paying window; no committee bribe is needed"
                .into(),
        ),
    }
    match bribe_bp_value(scenario.target, &scenario.txs, p) {
        Ok(v) => report.producer = Some(v),
        Err(_) => report.notes.push(
            "the target never reaches the producer's block; no producer bribe is needed".into(),
        ),
    }
    Ok(report)
}

/// The committee-share calibration for the single-bid mechanism: the split
/// maximizing the censorship bound min(m * f_cm, r * s) + f_bp.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZAnalysis {
    pub z_star: Money,
    pub objective_at_star: Money,
}

/// The censorship bound at one split: with premium fee (c - r) s routed as
/// f_cm = premium z and f_bp = premium (1 - z), the briber must beat
/// min(m * f_cm, r * s) + f_bp.
pub fn z_objective(c_t0: &Money, r: &Money, m: u32, s: &Money, z: &Money) -> Money {
    let premium = ((c_t0 - r) * s).clamp_zero();
    let f_cm = &premium * z;
    let f_bp = &premium * (Money::from_int(1) - z);
    (Money::from_int(m as i64) * f_cm).min(r * s) + f_bp
}

/// The bound-maximizing committee share: r s / (m premium) clamped to one.
/// Below it the bound grows with z at slope (m - 1) premium; above it the
/// burn term binds and the bound shrinks with the producer share.
pub fn optimal_z(c_t0: &Money, r: &Money, m: u32, s: &Money) -> Result<ZAnalysis> {
    if m == 0 {
        return Err(Error::InvalidParams("m must be positive".into()));
    }
    if !s.is_positive() {
        return Err(Error::InvalidParams("the size s must be positive".into()));
    }
    if c_t0 < r {
        return Err(Error::InvalidParams(format!(
            "the bid {c_t0} does not cover the burn rate {r}"
        )));
    }
    let one = Money::from_int(1);
    let z_star = if c_t0 == r {
        one.clone()
    } else {
        let candidate = (r / Money::from_int(m as i64)) / (c_t0 - r);
        candidate.min(one)
    };
    let objective_at_star = z_objective(c_t0, r, m, s, &z_star);
    Ok(ZAnalysis { z_star, objective_at_star })
}

/// A market in the plant-free bribery model: one target among `w` same-size
/// transactions, flat bribes, zero inclusion costs, and abstract block
/// rewards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplifiedScenario {
    pub m: u32,
    pub c_block: u32,
    pub c_incl: u32,
    /// Mempool size, the target included.
    pub w: u32,
    pub s: Money,
    pub r: Money,
    /// The target's committee fee when listed and included.
    pub f_cm: Money,
    /// The target's producer fee when included.
    pub f_bp: Money,
    /// Aggregate block rewards the producer forfeits on rejection.
    pub block_rewards: Money,
    /// Conditional lists excuse omissions in full blocks; unconditional
    /// lists never do.
    pub conditional: bool,
    /// Bribe to the producer for omitting the target from the block.
    pub bribe_bp: Money,
    /// Bribe per includer for omitting the target from their list.
    pub bribe_cm: Vec<Money>,
}

impl SimplifiedScenario {
    /// Structural sanity; the includer count is capped to keep the full
    /// profile enumeration small.
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > 16 {
            return Err(Error::InvalidParams("m must be between 1 and 16".into()));
        }
        if self.c_block == 0 || self.c_incl == 0 || self.w == 0 {
            return Err(Error::InvalidParams(
                "capacities and the mempool size must be positive".into(),
            ));
        }
        if !self.s.is_positive() {
            return Err(Error::InvalidParams("the size s must be positive".into()));
        }
        if self.bribe_cm.len() != self.m as usize {
            return Err(Error::InvalidParams(format!(
                "expected {} includer bribes, found {}",
                self.m,
                self.bribe_cm.len()
            )));
        }
        for v in [&self.r, &self.f_cm, &self.f_bp, &self.block_rewards, &self.bribe_bp]
            .into_iter()
            .chain(self.bribe_cm.iter())
        {
            if v.is_negative() {
                return Err(Error::InvalidParams("negative market quantity".into()));
            }
        }
        Ok(())
    }

    /// Direct plants needed to fill the block when the target is omitted:
    /// max(c_block - w + 1, 0).
    fn fill_count(&self) -> u32 {
        (self.c_block + 1).saturating_sub(self.w)
    }

    /// The producer's worst-case cost of censoring under conditional lists:
    /// the forfeited fee plus the burn on the fill plants.
    pub fn censoring_cost(&self) -> Money {
        &self.f_bp + &self.r * &self.s * Money::from_int(self.fill_count() as i64)
    }
}

/// Evaluations of the plant-free bribery predicates. `None` marks a theorem
/// whose structural hypotheses the scenario does not meet; the booleans are
/// the strict bribe inequalities alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdReport {
    /// Conditional lists: the producer bribe strictly exceeds the
    /// worst-case censoring cost, so censoring dominates and no equilibrium
    /// includes the target.
    pub censoring_dominant: Option<bool>,
    /// Conditional lists: the producer bribe strictly exceeds the producer
    /// fee, so an all-censoring equilibrium exists.
    pub censoring_equilibrium: Option<bool>,
    /// Conditional lists: the producer and every includer are strictly
    /// outbid, so no equilibrium includes the target.
    pub no_inclusion_equilibrium: Option<bool>,
    /// Unconditional lists with all lists fitting the block: the rewards
    /// strictly exceed the producer bribe, so honoring lists dominates.
    pub honoring_dominant: Option<bool>,
    /// Unconditional lists with the mempool fitting every list, smallest
    /// order paid: rewards and aggregate committee fees strictly outweigh
    /// the bribes, so every equilibrium includes the target.
    pub no_exclusion_equilibrium: Option<bool>,
    /// The producer's worst-case conditional-list censoring cost.
    pub censoring_cost: Money,
}

/// Evaluates the five bribery predicates on one plant-free market.
pub fn simplified_thresholds(sc: &SimplifiedScenario) -> Result<ThresholdReport> {
    sc.validate()?;
    let cost = sc.censoring_cost();
    let mut report = ThresholdReport {
        censoring_dominant: None,
        censoring_equilibrium: None,
        no_inclusion_equilibrium: None,
        honoring_dominant: None,
        no_exclusion_equilibrium: None,
        censoring_cost: cost.clone(),
    };
    if sc.conditional {
        report.censoring_dominant = Some(sc.bribe_bp > cost);
        report.censoring_equilibrium = Some(sc.bribe_bp > sc.f_bp);
        report.no_inclusion_equilibrium =
            Some(sc.bribe_bp > sc.f_bp && sc.bribe_cm.iter().all(|b| b > &sc.f_cm));
    } else {
        let lists_fit = sc.m * sc.c_incl <= sc.c_block;
        if lists_fit {
            report.honoring_dominant = Some(sc.bribe_bp < sc.block_rewards);
        }
        if lists_fit && sc.w <= sc.c_incl {
            let total: Money = sc.bribe_cm.iter().sum();
            report.no_exclusion_equilibrium = Some(
                sc.bribe_bp < sc.block_rewards
                    && total < Money::from_int(sc.m as i64) * &sc.f_cm,
            );
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum ProducerMove {
    Include,
    /// Omit the target and pad the block with burn-only plants when
    /// validity requires a full block.
    OmitFill,
    /// Omit the target and leave the block as-is, accepting rejection.
    OmitBare,
}

const PRODUCER_MOVES: [ProducerMove; 3] =
    [ProducerMove::Include, ProducerMove::OmitFill, ProducerMove::OmitBare];

struct Outcome {
    target_in_block: bool,
    producer: Money,
}

/// Exact payoffs of one pure profile. Listed transactions bind the block:
/// conditional lists forgive omissions when real rivals fill it (or plants
/// are burned to fill it); unconditional lists never forgive them.
fn outcome(sc: &SimplifiedScenario, listers: &[bool], bp: ProducerMove) -> Outcome {
    let listed = listers.iter().any(|x| *x);
    let burn = &sc.r * &sc.s;
    match bp {
        ProducerMove::Include => Outcome {
            target_in_block: true,
            producer: &sc.block_rewards + &sc.f_bp,
        },
        ProducerMove::OmitFill => {
            if !listed {
                return Outcome {
                    target_in_block: false,
                    producer: &sc.block_rewards + &sc.bribe_bp,
                };
            }
            if sc.conditional {
                let fills = Money::from_int(sc.fill_count() as i64);
                Outcome {
                    target_in_block: false,
                    producer: &sc.block_rewards + &sc.bribe_bp - burn * fills,
                }
            } else {
                // No padding excuses dropping a listed transaction.
                Outcome { target_in_block: false, producer: sc.bribe_bp.clone() }
            }
        }
        ProducerMove::OmitBare => {
            if !listed {
                return Outcome {
                    target_in_block: false,
                    producer: &sc.block_rewards + &sc.bribe_bp,
                };
            }
            let excused = sc.conditional && sc.fill_count() == 0;
            Outcome {
                target_in_block: false,
                producer: if excused {
                    &sc.block_rewards + &sc.bribe_bp
                } else {
                    sc.bribe_bp.clone()
                },
            }
        }
    }
}

/// An includer's payoff: the bribe when omitting; the committee fee when
/// they are the smallest-order lister of an included target.
fn includer_payoff(sc: &SimplifiedScenario, listers: &[bool], j: usize, out: &Outcome) -> Money {
    if !listers[j] {
        return sc.bribe_cm[j].clone();
    }
    let paid = out.target_in_block && listers.iter().take(j).all(|x| !x);
    if paid {
        sc.f_cm.clone()
    } else {
        Money::zero()
    }
}

/// What the full pure-profile enumeration found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerationFindings {
    pub profiles: u64,
    /// An omission strictly beat inclusion for the producer in every
    /// includer profile.
    pub censoring_dominant: bool,
    /// Inclusion strictly beat both omissions whenever the target was
    /// listed.
    pub honoring_dominant: bool,
    /// The profile where everyone omits is a simultaneous equilibrium.
    pub censoring_equilibrium: bool,
    pub static_equilibria: u64,
    pub static_equilibria_with_target: u64,
    /// Equilibria of the two-stage game: listers move, the producer best
    /// responds; a deviation counts only if it profits under the worst
    /// best-response tie-break.
    pub sequential_equilibria: u64,
    pub sequential_equilibria_excluding_target: u64,
}

/// Enumerates every pure profile of the plant-free game and classifies the
/// equilibria of both the simultaneous and the two-stage reading.
pub fn enumerate_simplified(sc: &SimplifiedScenario) -> Result<EnumerationFindings> {
    sc.validate()?;
    let m = sc.m as usize;
    let mut findings = EnumerationFindings {
        profiles: 0,
        censoring_dominant: true,
        honoring_dominant: true,
        censoring_equilibrium: false,
        static_equilibria: 0,
        static_equilibria_with_target: 0,
        sequential_equilibria: 0,
        sequential_equilibria_excluding_target: 0,
    };

    let producer_payoff = |listers: &[bool], bp: ProducerMove| outcome(sc, listers, bp).producer;
    let best_responses = |listers: &[bool]| -> Vec<ProducerMove> {
        let best = PRODUCER_MOVES
            .iter()
            .map(|bp| producer_payoff(listers, *bp))
            .max()
            .expect("nonempty");
        PRODUCER_MOVES
            .into_iter()
            .filter(|bp| producer_payoff(listers, *bp) == best)
            .collect()
    };

    for lmask in 0u32..(1 << m) {
        let listers: Vec<bool> = (0..m).map(|j| lmask & (1 << j) != 0).collect();
        let listed = listers.iter().any(|x| *x);

        let include = producer_payoff(&listers, ProducerMove::Include);
        let best_omit = producer_payoff(&listers, ProducerMove::OmitFill)
            .max(producer_payoff(&listers, ProducerMove::OmitBare));
        if best_omit <= include {
            findings.censoring_dominant = false;
        }
        if listed && include <= best_omit {
            findings.honoring_dominant = false;
        }

        for bp in PRODUCER_MOVES {
            findings.profiles += 1;
            let out = outcome(sc, &listers, bp);

            let producer_stays = PRODUCER_MOVES
                .iter()
                .all(|alt| producer_payoff(&listers, *alt) <= out.producer);
            let includers_stay = (0..m).all(|j| {
                let mut flipped = listers.clone();
                flipped[j] = !flipped[j];
                let alt_out = outcome(sc, &flipped, bp);
                includer_payoff(sc, &flipped, j, &alt_out)
                    <= includer_payoff(sc, &listers, j, &out)
            });
            if producer_stays && includers_stay {
                findings.static_equilibria += 1;
                if out.target_in_block {
                    findings.static_equilibria_with_target += 1;
                }
                if lmask == 0 && bp == ProducerMove::OmitBare {
                    findings.censoring_equilibrium = true;
                }
            }
        }

        // Two-stage reading: the producer best responds to the lists. A
        // lister's deviation pays off only if its worst best-response
        // outcome beats their best current one.
        let current = best_responses(&listers);
        let stable = (0..m).all(|j| {
            let mut flipped = listers.clone();
            flipped[j] = !flipped[j];
            let worst_after = best_responses(&flipped)
                .into_iter()
                .map(|bp| {
                    let out = outcome(sc, &flipped, bp);
                    includer_payoff(sc, &flipped, j, &out)
                })
                .min()
                .expect("nonempty");
            let best_now = current
                .iter()
                .map(|bp| {
                    let out = outcome(sc, &listers, *bp);
                    includer_payoff(sc, &listers, j, &out)
                })
                .max()
                .expect("nonempty");
            worst_after <= best_now
        });
        if stable {
            findings.sequential_equilibria += 1;
            if current
                .iter()
                .any(|bp| !outcome(sc, &listers, *bp).target_in_block)
            {
                findings.sequential_equilibria_excluding_target += 1;
            }
        }
    }
    Ok(findings)
}

/// Cross-checks every applicable bribery predicate against the full
/// enumeration. The verdict is about consistency in the plant-free model
/// only; it says nothing about markets where mempool plants are allowed.
pub fn verify_simplified_by_enumeration(sc: &SimplifiedScenario) -> Result<PropertyReport> {
    let thresholds = simplified_thresholds(sc)?;
    let findings = enumerate_simplified(sc)?;

    let mut notes = vec![
        "plant-free model: mempool plants are excluded from the strategy space by construction"
            .into(),
        format!(
            "{} profiles, {} simultaneous equilibria ({} including the target), {} two-stage equilibria ({} excluding it)",
            findings.profiles,
            findings.static_equilibria,
            findings.static_equilibria_with_target,
            findings.sequential_equilibria,
            findings.sequential_equilibria_excluding_target,
        ),
    ];
    let mut failure: Option<String> = None;
    let mut check = |name: &str, predicate: Option<bool>, confirmed: bool| {
        match predicate {
            None => notes.push(format!("{name}: inapplicable")),
            Some(false) => notes.push(format!("{name}: below threshold, no claim")),
            Some(true) if confirmed => notes.push(format!("{name}: confirmed by enumeration")),
            Some(true) => {
                if failure.is_none() {
                    failure = Some(name.to_string());
                }
                notes.push(format!("{name}: asserted by the threshold but refuted by enumeration"));
            }
        }
    };
    check(
        "censoring dominant",
        thresholds.censoring_dominant,
        findings.censoring_dominant && findings.static_equilibria_with_target == 0,
    );
    check(
        "censoring equilibrium exists",
        thresholds.censoring_equilibrium,
        findings.censoring_equilibrium,
    );
    check(
        "no inclusion equilibrium",
        thresholds.no_inclusion_equilibrium,
        findings.static_equilibria_with_target == 0,
    );
    check("honoring dominant", thresholds.honoring_dominant, findings.honoring_dominant);
    check(
        "no exclusion equilibrium",
        thresholds.no_exclusion_equilibrium,
        findings.sequential_equilibria_excluding_target == 0,
    );

    let mut report = PropertyReport {
        property: PropertyKind::SimplifiedConsistency,
        verdict: Verdict::Holds,
        witness: None,
        utility_delta: None,
        precondition_unmet: None,
        deviations_checked: findings.profiles,
        notes,
    };
    if let Some(name) = failure {
        report.verdict = Verdict::Violated;
        report.utility_delta = Some(Money::from_int(1));
        report.witness = Some(Witness::Gap(GapWitness {
            description: format!(
                "the {name} predicate holds by threshold but the profile enumeration refutes it"
            ),
            shortfall: Money::from_int(1),
        }));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bribery::TypeAssignment;
    use crate::core::{Bid, ListVariant, ScenarioParams, SenderVariant, Transaction};
    use crate::equilibrium::StrategySpace;
    use crate::scenario::Scenario;

    fn congested_fixture() -> Scenario {
        let p = ScenarioParams {
            m: 1,
            c_block: 1,
            c_incl: 1,
            s: Money::from_int(1),
            r: Money::from_int(1),
            gamma: Money::from_int(1),
            mu_cost_cm: Money::zero(),
            mu_cost_bp: Money::zero(),
            z: Money::ratio(1, 2),
            unit: Money::from_int(1),
            lists: ListVariant::Conditional,
            senders: SenderVariant::MultiSender,
        };
        let tx = |id: u64, sender: &str, dcm: i64, dbp: i64| {
            let bid = Bid::Double {
                delta_cm: Money::from_int(dcm),
                delta_bp: Money::from_int(dbp),
                c: Money::from_int(dcm + dbp + 1),
            };
            Transaction::user(id, sender, Money::from_int(dcm + dbp + 4), bid)
        };
        let assignment = TypeAssignment::uniform(
            1,
            crate::bribery::BribeType::FlatCm(Money::zero()),
            crate::bribery::BribeType::FlatBp(Money::zero()),
        );
        Scenario {
            beliefs: vec![crate::bribery::BeliefCm::point_mass(&assignment)],
            assignment,
            params: p,
            tfm: TfmKind::Double,
            txs: vec![tx(1, "a", 1, 4), tx(2, "b", 1, 2)],
            target: TxId(1),
            space: StrategySpace::default(),
        }
    }

    fn conditional_fixture(bribe_bp: Money) -> SimplifiedScenario {
        SimplifiedScenario {
            m: 2,
            c_block: 4,
            c_incl: 1,
            w: 3,
            s: Money::from_int(1),
            r: Money::from_int(1),
            f_cm: Money::from_int(2),
            f_bp: Money::from_int(3),
            block_rewards: Money::from_int(10),
            conditional: true,
            bribe_bp,
            bribe_cm: vec![Money::from_int(3), Money::from_int(3)],
        }
    }

    fn unconditional_fixture() -> SimplifiedScenario {
        SimplifiedScenario {
            m: 2,
            c_block: 2,
            c_incl: 1,
            w: 1,
            s: Money::from_int(1),
            r: Money::from_int(1),
            f_cm: Money::from_int(3),
            f_bp: Money::from_int(2),
            block_rewards: Money::from_int(10),
            conditional: false,
            bribe_bp: Money::from_int(4),
            bribe_cm: vec![Money::from_int(2), Money::from_int(2)],
        }
    }

    #[test]
    fn producer_bribe_is_the_fee_gap_when_congested() {
        let s = congested_fixture();
        // The target's producer fee is 4; the displaced rival pays 2.
        assert_eq!(min_bribe_bp(&s, TfmKind::Double).unwrap(), Money::from_int(2));
        let report = min_bribes(&s).unwrap();
        assert_eq!(report.producer.unwrap(), Money::from_int(2));
        assert_eq!(report.critical_order, Some(1));
        assert!(report.committee.is_some());
    }

    #[test]
    fn optimal_z_matches_the_closed_form_and_the_grid() {
        let z = optimal_z(&Money::from_int(2), &Money::from_int(1), 4, &Money::from_int(1))
            .unwrap();
        assert_eq!(z.z_star, Money::ratio(1, 4));
        assert_eq!(z.objective_at_star, Money::ratio(7, 4));
        for k in 0..=1000 {
            let grid_z = Money::ratio(k, 1000);
            let v = z_objective(
                &Money::from_int(2),
                &Money::from_int(1),
                4,
                &Money::from_int(1),
                &grid_z,
            );
            assert!(v <= z.objective_at_star, "grid beat the closed form at {grid_z}");
        }

        let clamp = optimal_z(&Money::ratio(5, 4), &Money::from_int(1), 2, &Money::from_int(1))
            .unwrap();
        assert_eq!(clamp.z_star, Money::from_int(1));

        let flat = optimal_z(&Money::from_int(1), &Money::from_int(1), 3, &Money::from_int(1))
            .unwrap();
        assert_eq!(flat.z_star, Money::from_int(1));
        assert_eq!(flat.objective_at_star, Money::zero());

        assert!(optimal_z(&Money::ratio(1, 2), &Money::from_int(1), 3, &Money::from_int(1))
            .is_err());
    }

    #[test]
    fn censoring_threshold_is_fee_plus_fill_burn() {
        // Worst-case censoring cost: 3 + 1 * (4 - 3 + 1) = 5.
        let above = conditional_fixture(Money::ratio(11, 2));
        let t = simplified_thresholds(&above).unwrap();
        assert_eq!(t.censoring_cost, Money::from_int(5));
        assert_eq!(t.censoring_dominant, Some(true));
        assert_eq!(t.censoring_equilibrium, Some(true));
        assert_eq!(t.no_inclusion_equilibrium, Some(true));
        assert_eq!(t.honoring_dominant, None);
        assert_eq!(t.no_exclusion_equilibrium, None);
    }

    #[test]
    fn boundary_bribes_leave_strict_predicates_false() {
        let mut at = conditional_fixture(Money::from_int(3));
        at.bribe_cm = vec![Money::from_int(2), Money::from_int(2)];
        let t = simplified_thresholds(&at).unwrap();
        assert_eq!(t.censoring_dominant, Some(false));
        assert_eq!(t.censoring_equilibrium, Some(false));
        assert_eq!(t.no_inclusion_equilibrium, Some(false));
    }

    #[test]
    fn unconditional_predicates_follow_the_reward_gap() {
        let sc = unconditional_fixture();
        let t = simplified_thresholds(&sc).unwrap();
        assert_eq!(t.honoring_dominant, Some(true));
        // 2 + 2 = 4 < 2 * 3 = 6 and 4 < 10.
        assert_eq!(t.no_exclusion_equilibrium, Some(true));
        assert_eq!(t.censoring_dominant, None);

        let mut wide = sc.clone();
        wide.c_incl = 2;
        let t2 = simplified_thresholds(&wide).unwrap();
        // 2 * 2 = 4 lists slots no longer fit the 2-slot block.
        assert_eq!(t2.honoring_dominant, None);
        assert_eq!(t2.no_exclusion_equilibrium, None);
    }

    #[test]
    fn enumeration_confirms_applicable_predicates() {
        for sc in [
            conditional_fixture(Money::ratio(11, 2)),
            conditional_fixture(Money::from_int(3)),
            conditional_fixture(Money::zero()),
            unconditional_fixture(),
        ] {
            let r = verify_simplified_by_enumeration(&sc).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.notes);
            assert_eq!(r.property, PropertyKind::SimplifiedConsistency);
        }
    }

    #[test]
    fn one_unit_perturbations_flip_the_enumeration() {
        // Above the censoring threshold the omission dominates; at the
        // threshold it ties with inclusion and dominance disappears.
        let above = enumerate_simplified(&conditional_fixture(Money::from_int(6))).unwrap();
        assert!(above.censoring_dominant);
        assert_eq!(above.static_equilibria_with_target, 0);
        let at = enumerate_simplified(&conditional_fixture(Money::from_int(5))).unwrap();
        assert!(!at.censoring_dominant);

        // Below the aggregate committee threshold no two-stage equilibrium
        // excludes the target; at it, the all-omit profile becomes stable.
        let under = enumerate_simplified(&unconditional_fixture()).unwrap();
        assert_eq!(under.sequential_equilibria_excluding_target, 0);
        let mut at_cm = unconditional_fixture();
        at_cm.bribe_cm = vec![Money::from_int(3), Money::from_int(3)];
        let at2 = enumerate_simplified(&at_cm).unwrap();
        assert!(at2.sequential_equilibria_excluding_target > 0);
    }

    #[test]
    fn zero_bribes_make_full_inclusion_an_equilibrium() {
        let mut sc = conditional_fixture(Money::zero());
        sc.bribe_cm = vec![Money::zero(), Money::zero()];
        let findings = enumerate_simplified(&sc).unwrap();
        assert!(findings.static_equilibria_with_target > 0);
        assert!(!findings.censoring_dominant);
    }
}
