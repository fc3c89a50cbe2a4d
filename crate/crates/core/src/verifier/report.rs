use alloc::vec::Vec;
use core::fmt;

use crate::grid::BidProfile;
use crate::mechanism::{DomainError, Mechanism, Outcome};
use crate::money::{Money, Utility};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    /// Truthful bidding never yields negative utility.
    Ir,
    /// Truthful bidding is a Nash equilibrium at every valuation profile.
    Ic,
    /// Truthful bidding is a spite-free Nash equilibrium: no own gain, and no
    /// own-neutral deviation that weakly hurts all rivals and strictly hurts one.
    Sic,
    /// Like `Sic` but any own-neutral deviation strictly hurting some rival counts.
    Esic,
    Anon,
    Eff,
    /// Losers pay nothing.
    LoserPaysZero,
    /// Given rivals' bids, payment does not depend on own bid (conditional on win/loss).
    PaymentIgnoresOwnBid,
    /// Raising one's bid never loses the item.
    WinMonotone,
    /// A winner's payment is the same across all profiles she wins.
    ConstantWinnerPayment,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Ir,
        Property::Ic,
        Property::Sic,
        Property::Esic,
        Property::Anon,
        Property::Eff,
        Property::LoserPaysZero,
        Property::PaymentIgnoresOwnBid,
        Property::WinMonotone,
        Property::ConstantWinnerPayment,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Property::Ir => "IR",
            Property::Ic => "IC",
            Property::Sic => "SIC",
            Property::Esic => "ESIC",
            Property::Anon => "ANON",
            Property::Eff => "EFF",
            Property::LoserPaysZero => "LOSER_PAYS_ZERO",
            Property::PaymentIgnoresOwnBid => "PAYMENT_IGNORES_OWN_BID",
            Property::WinMonotone => "WIN_MONOTONE",
            Property::ConstantWinnerPayment => "CONSTANT_WINNER_PAYMENT",
        }
    }

    pub fn from_name(s: &str) -> Option<Property> {
        let up = s.trim().to_ascii_uppercase();
        Property::ALL.iter().copied().find(|p| p.name() == up)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Concrete counterexample to a property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A single profile violates the property for `agent` (IR, zero payment, efficiency).
    Profile {
        profile: BidProfile,
        agent: usize,
        outcome: Outcome,
    },
    /// At true values `values`, `agent` switching to `deviation` changes
    /// utilities (all evaluated at `values`) from `before` to `after`.
    Deviation {
        values: BidProfile,
        agent: usize,
        deviation: Money,
        before: Vec<Utility>,
        after: Vec<Utility>,
    },
    /// Two profiles whose outcomes for `agent` are inconsistent.
    Pair {
        agent: usize,
        first: BidProfile,
        second: BidProfile,
        first_outcome: Outcome,
        second_outcome: Outcome,
    },
    /// Relabelling agents by `permutation` (agent `i` moves to `permutation[i]`)
    /// does not relabel the outcome.
    Permutation {
        profile: BidProfile,
        permutation: Vec<usize>,
        outcome: Outcome,
        permuted_outcome: Outcome,
    },
}

/// Relabels a bid profile: agent `i`'s bid moves to slot `perm[i]`.
pub fn permute_profile(profile: &[Money], perm: &[usize]) -> BidProfile {
    let mut out = profile.to_vec();
    for (i, &p) in perm.iter().enumerate() {
        out[p] = profile[i];
    }
    out
}

pub fn permute_outcome(outcome: &Outcome, perm: &[usize]) -> Outcome {
    let mut payments = outcome.payments.clone();
    for (i, &p) in perm.iter().enumerate() {
        payments[p] = outcome.payments[i];
    }
    Outcome {
        winner: outcome.winner.map(|w| perm[w]),
        payments,
    }
}

/// Own-gain clause shared by IC, SIC and ESIC.
pub(crate) fn own_gain(agent: usize, before: &[Utility], after: &[Utility]) -> bool {
    after[agent] > before[agent]
}

pub(crate) fn spiteful(agent: usize, before: &[Utility], after: &[Utility]) -> bool {
    let others = || (0..before.len()).filter(move |&j| j != agent);
    after[agent] == before[agent]
        && others().all(|j| after[j] <= before[j])
        && others().any(|j| after[j] < before[j])
}

pub(crate) fn extreme_spiteful(agent: usize, before: &[Utility], after: &[Utility]) -> bool {
    after[agent] == before[agent] && (0..before.len()).any(|j| j != agent && after[j] < before[j])
}

/// Whether `property` is violated by a deviation with these utility vectors.
pub(crate) fn deviation_violates(
    property: Property,
    agent: usize,
    before: &[Utility],
    after: &[Utility],
) -> bool {
    match property {
        Property::Ic => own_gain(agent, before, after),
        Property::Sic => own_gain(agent, before, after) || spiteful(agent, before, after),
        Property::Esic => own_gain(agent, before, after) || extreme_spiteful(agent, before, after),
        _ => false,
    }
}

impl Witness {
    /// Re-evaluates `mechanism` at the witness profiles and confirms that the
    /// recorded violation of `property` is reproduced exactly.
    pub fn replay<M: Mechanism + ?Sized>(
        &self,
        property: Property,
        mechanism: &M,
    ) -> Result<bool, DomainError> {
        Ok(match self {
            Witness::Profile {
                profile,
                agent,
                outcome,
            } => {
                let o = mechanism.evaluate(profile)?;
                if o != *outcome {
                    return Ok(false);
                }
                let a = *agent;
                match property {
                    Property::Ir => crate::mechanism::utility(&o, a, &profile[a])? < Utility::from_integer(0),
                    Property::LoserPaysZero => o.winner != Some(a) && !o.payments[a].is_zero(),
                    Property::Eff => {
                        o.winner == Some(a) && profile.iter().any(|b| *b > profile[a])
                    }
                    _ => false,
                }
            }
            Witness::Deviation {
                values,
                agent,
                deviation,
                before,
                after,
            } => {
                let base = mechanism.evaluate(values)?;
                let mut dev = values.clone();
                dev[*agent] = *deviation;
                let moved = mechanism.evaluate(&dev)?;
                let u0 = base.utilities(values);
                let u1 = moved.utilities(values);
                u0 == *before && u1 == *after && deviation_violates(property, *agent, &u0, &u1)
            }
            Witness::Pair {
                agent,
                first,
                second,
                first_outcome,
                second_outcome,
            } => {
                let a = *agent;
                let o1 = mechanism.evaluate(first)?;
                let o2 = mechanism.evaluate(second)?;
                if o1 != *first_outcome || o2 != *second_outcome {
                    return Ok(false);
                }
                let same_rivals = (0..first.len()).all(|j| j == a || first[j] == second[j]);
                match property {
                    Property::PaymentIgnoresOwnBid => {
                        same_rivals
                            && (o1.winner == Some(a)) == (o2.winner == Some(a))
                            && o1.payments[a] != o2.payments[a]
                    }
                    Property::WinMonotone => {
                        same_rivals
                            && second[a] > first[a]
                            && o1.winner == Some(a)
                            && o2.winner != Some(a)
                    }
                    Property::ConstantWinnerPayment => {
                        o1.winner == Some(a)
                            && o2.winner == Some(a)
                            && o1.payments[a] != o2.payments[a]
                    }
                    _ => false,
                }
            }
            Witness::Permutation {
                profile,
                permutation,
                outcome,
                permuted_outcome,
            } => {
                let o = mechanism.evaluate(profile)?;
                let p = mechanism.evaluate(&permute_profile(profile, permutation))?;
                property == Property::Anon
                    && o == *outcome
                    && p == *permuted_outcome
                    && p != permute_outcome(&o, permutation)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: Property,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Number of (profile, deviation) pairs, or profiles for single-profile
    /// properties, that were examined.
    pub checked: u64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Result of checking a contiguous range of profiles. Partial results merge
/// associatively; the witness at the smallest profile index wins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialReport {
    pub property: Property,
    pub first_failure: Option<(usize, Witness)>,
    pub checked: u64,
}

impl PartialReport {
    pub fn empty(property: Property) -> Self {
        PartialReport {
            property,
            first_failure: None,
            checked: 0,
        }
    }

    pub fn merge(mut self, other: PartialReport) -> PartialReport {
        debug_assert_eq!(self.property, other.property);
        self.checked += other.checked;
        self.first_failure = match (self.first_failure, other.first_failure) {
            (Some(a), Some(b)) => Some(if b.0 < a.0 { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }

    pub fn finish(self) -> PropertyReport {
        let witness = self.first_failure.map(|(_, w)| w);
        PropertyReport {
            property: self.property,
            verdict: if witness.is_some() {
                Verdict::Fail
            } else {
                Verdict::Pass
            },
            witness,
            checked: self.checked,
        }
    }
}
