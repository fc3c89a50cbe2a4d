//! Exhaustive incentive checks over finite candidate domains.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use thiserror::Error;

use crate::money::{Money, Utility};
use crate::verifier::{deviation_violates, Property, Verdict};

use super::bundle::{Bundle, MultiError, MultiOutcome, Valuation};
use super::MultiMechanism;

/// Counterexample: at true values `values`, `agent` bidding `deviation`
/// (or truthfully, for IR) yields utilities `after` instead of `before`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiWitness<B> {
    pub values: Vec<B>,
    pub agent: usize,
    pub deviation: Option<B>,
    pub truthful: MultiOutcome,
    pub deviated: Option<MultiOutcome>,
    pub before: Vec<Utility>,
    pub after: Vec<Utility>,
}

impl<B: Valuation + Clone + PartialEq> MultiWitness<B> {
    /// Re-runs the mechanism and confirms the recorded violation.
    pub fn replay<M: MultiMechanism<Bid = B>>(
        &self,
        property: Property,
        mech: &M,
    ) -> Result<bool, MultiError> {
        let truthful = mech.allocate(&self.values)?;
        let before = truthful.utilities(&self.values);
        if truthful != self.truthful || before != self.before {
            return Ok(false);
        }
        match (&self.deviation, property) {
            (None, Property::Ir) => Ok(before[self.agent] < Utility::from_integer(0)),
            (Some(dev), _) => {
                let mut bids = self.values.clone();
                bids[self.agent] = dev.clone();
                let moved = mech.allocate(&bids)?;
                let after = moved.utilities(&self.values);
                Ok(Some(&moved) == self.deviated.as_ref()
                    && after == self.after
                    && deviation_violates(property, self.agent, &before, &after))
            }
            _ => Ok(false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiReport<B> {
    pub property: Property,
    pub verdict: Verdict,
    pub witness: Option<MultiWitness<B>>,
    /// Truthful profiles (IR) or (profile, deviation) pairs examined.
    pub checked: u64,
}

impl<B> MultiReport<B> {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn validate<B>(agents: usize, candidates: &[Vec<B>], truths: &[Vec<B>]) -> Result<(), MultiError> {
    for set in [candidates, truths] {
        if set.len() != agents {
            return Err(MultiError::AgentCountMismatch {
                expected: agents,
                got: set.len(),
            });
        }
        if let Some(i) = set.iter().position(Vec::is_empty) {
            return Err(MultiError::EmptyDomain(i));
        }
    }
    Ok(())
}

/// All profiles of the product `sets[0] × sets[1] × ...`, first agent slowest.
fn product<B: Clone>(sets: &[Vec<B>]) -> Vec<Vec<B>> {
    let mut out: Vec<Vec<B>> = alloc::vec![Vec::new()];
    for set in sets {
        out = out
            .into_iter()
            .flat_map(|p| {
                set.iter().map(move |b| {
                    let mut q = p.clone();
                    q.push(b.clone());
                    q
                })
            })
            .collect();
    }
    out
}

/// Checks IR, IC, SIC or ESIC. True profiles range over the product of
/// `truths`; agent `i` may deviate to any bid in `candidates[i]`.
pub fn check_multi<M>(
    property: Property,
    mech: &M,
    candidates: &[Vec<M::Bid>],
    truths: &[Vec<M::Bid>],
) -> Result<MultiReport<M::Bid>, MultiError>
where
    M: MultiMechanism,
    M::Bid: Clone + PartialEq,
{
    if !matches!(property, Property::Ir | Property::Ic | Property::Sic | Property::Esic) {
        return Err(MultiError::UnsupportedProperty(property.name()));
    }
    validate(mech.agents(), candidates, truths)?;
    let mut checked = 0u64;
    let mut witness = None;
    for values in product(truths) {
        let truthful = mech.allocate(&values)?;
        debug_assert!(truthful.is_feasible(mech.items()));
        let before = truthful.utilities(&values);
        if property == Property::Ir {
            checked += 1;
            if witness.is_none() {
                if let Some(agent) = before.iter().position(|u| *u < Utility::from_integer(0)) {
                    witness = Some(MultiWitness {
                        values: values.clone(),
                        agent,
                        deviation: None,
                        truthful: truthful.clone(),
                        deviated: None,
                        before: before.clone(),
                        after: before.clone(),
                    });
                }
            }
            continue;
        }
        for agent in 0..mech.agents() {
            for dev in &candidates[agent] {
                if *dev == values[agent] {
                    continue;
                }
                checked += 1;
                if witness.is_some() {
                    continue;
                }
                let mut bids = values.clone();
                bids[agent] = dev.clone();
                let moved = mech.allocate(&bids)?;
                debug_assert!(moved.is_feasible(mech.items()));
                let after = moved.utilities(&values);
                if deviation_violates(property, agent, &before, &after) {
                    witness = Some(MultiWitness {
                        values: values.clone(),
                        agent,
                        deviation: Some(dev.clone()),
                        truthful: truthful.clone(),
                        deviated: Some(moved),
                        before: before.clone(),
                        after,
                    });
                }
            }
        }
    }
    Ok(MultiReport {
        property,
        verdict: if witness.is_some() {
            Verdict::Fail
        } else {
            Verdict::Pass
        },
        witness,
        checked,
    })
}

pub fn check_multi_ir<M>(
    mech: &M,
    candidates: &[Vec<M::Bid>],
    truths: &[Vec<M::Bid>],
) -> Result<MultiReport<M::Bid>, MultiError>
where
    M: MultiMechanism,
    M::Bid: Clone + PartialEq,
{
    check_multi(Property::Ir, mech, candidates, truths)
}

pub fn check_multi_ic<M>(
    mech: &M,
    candidates: &[Vec<M::Bid>],
    truths: &[Vec<M::Bid>],
) -> Result<MultiReport<M::Bid>, MultiError>
where
    M: MultiMechanism,
    M::Bid: Clone + PartialEq,
{
    check_multi(Property::Ic, mech, candidates, truths)
}

pub fn check_multi_sic<M>(
    mech: &M,
    candidates: &[Vec<M::Bid>],
    truths: &[Vec<M::Bid>],
) -> Result<MultiReport<M::Bid>, MultiError>
where
    M: MultiMechanism,
    M::Bid: Clone + PartialEq,
{
    check_multi(Property::Sic, mech, candidates, truths)
}

/// Two own bids that win the same bundle against the same opposing bid at
/// different prices. A spite-free mechanism never does this.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnBidDependence<B> {
    pub agent: usize,
    pub bundle: Bundle,
    pub opposing: B,
    pub first_bid: B,
    pub second_bid: B,
    pub first_payment: Money,
    pub second_payment: Money,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PaymentRangeError<B: core::fmt::Debug> {
    #[error("payment ranges are defined for two agents, got {0}")]
    NotTwoAgents(usize),
    #[error(transparent)]
    Domain(#[from] MultiError),
    #[error("payment for {} depends on the own bid: {:?}", .0.bundle, .0)]
    DependsOnOwnBid(OwnBidDependence<B>),
}

/// `2^(K - |T|)`.
pub fn payment_range_bound(items: usize, bundle: Bundle) -> u64 {
    1u64 << (items - bundle.len())
}

/// Distinct payments `agent` makes when receiving `bundle`, over every
/// opposing bid in `opposing` and own bid in `probe`.
pub fn payment_range_cardinality<M>(
    mech: &M,
    agent: usize,
    bundle: Bundle,
    opposing: &[M::Bid],
    probe: &[M::Bid],
) -> Result<usize, PaymentRangeError<M::Bid>>
where
    M: MultiMechanism,
    M::Bid: Clone + core::fmt::Debug,
{
    if mech.agents() != 2 || agent > 1 {
        return Err(PaymentRangeError::NotTwoAgents(mech.agents()));
    }
    let mut range = BTreeSet::new();
    for other in opposing {
        let mut first: Option<(&M::Bid, Money)> = None;
        for own in probe {
            let mut bids = alloc::vec![own.clone(), other.clone()];
            if agent == 1 {
                bids.swap(0, 1);
            }
            let o = mech.allocate(&bids)?;
            if o.bundles[agent] != bundle {
                continue;
            }
            let p = o.payments[agent];
            match first {
                None => first = Some((own, p)),
                Some((b0, p0)) if p0 != p => {
                    return Err(PaymentRangeError::DependsOnOwnBid(OwnBidDependence {
                        agent,
                        bundle,
                        opposing: other.clone(),
                        first_bid: b0.clone(),
                        second_bid: own.clone(),
                        first_payment: p0,
                        second_payment: p,
                    }));
                }
                Some(_) => {}
            }
            range.insert(p);
        }
    }
    Ok(range.len())
}

/// Per-bundle payment range against its bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaymentRange {
    pub bundle: Bundle,
    pub cardinality: usize,
    pub bound: u64,
}

impl PaymentRange {
    pub fn within_bound(&self) -> bool {
        self.cardinality as u64 <= self.bound
    }
}

/// [`payment_range_cardinality`] for every bundle over the mechanism's items.
pub fn payment_ranges<M>(
    mech: &M,
    agent: usize,
    opposing: &[M::Bid],
    probe: &[M::Bid],
) -> Result<Vec<PaymentRange>, PaymentRangeError<M::Bid>>
where
    M: MultiMechanism,
    M::Bid: Clone + core::fmt::Debug,
{
    Bundle::all(mech.items())
        .map(|bundle| {
            Ok(PaymentRange {
                bundle,
                cardinality: payment_range_cardinality(mech, agent, bundle, opposing, probe)?,
                bound: payment_range_bound(mech.items(), bundle),
            })
        })
        .collect()
}
