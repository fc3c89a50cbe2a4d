//! Serializable mirrors of core results. Amounts are rational strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use spitefree_core::mechanisms::{BoundaryRule, ThresholdSpec};
use spitefree_core::multiitem::{
    Bundle, BundleValuation, HomogeneousSubmodularValuation, MultiOutcome, MultiWitness, Region,
    Valuation,
};
use spitefree_core::verifier::{PropertyReport, Witness};
use spitefree_core::{MechanismTable, Money, Outcome, Utility};

use crate::error::CliError;
use crate::specfile::parse_money;

pub fn amounts(xs: &[Money]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

pub fn utilities(xs: &[Utility]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn parse_amounts(xs: &[String]) -> Result<Vec<Money>, CliError> {
    xs.iter().map(|x| parse_money(x)).collect()
}

fn parse_utilities(xs: &[String]) -> Result<Vec<Utility>, CliError> {
    xs.iter()
        .map(|x| {
            x.parse::<Utility>()
                .map_err(|e| CliError::Input(format!("bad utility {x:?}: {e}")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeWire {
    /// 0-based winning agent, absent when unallocated.
    pub winner: Option<usize>,
    pub payments: Vec<String>,
}

impl From<&Outcome> for OutcomeWire {
    fn from(o: &Outcome) -> Self {
        OutcomeWire {
            winner: o.winner,
            payments: amounts(&o.payments),
        }
    }
}

impl OutcomeWire {
    pub fn to_core(&self) -> Result<Outcome, CliError> {
        Ok(Outcome {
            winner: self.winner,
            payments: parse_amounts(&self.payments)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessWire {
    Profile {
        profile: Vec<String>,
        agent: usize,
        outcome: OutcomeWire,
    },
    Deviation {
        values: Vec<String>,
        agent: usize,
        deviation: String,
        before: Vec<String>,
        after: Vec<String>,
    },
    Pair {
        agent: usize,
        first: Vec<String>,
        second: Vec<String>,
        first_outcome: OutcomeWire,
        second_outcome: OutcomeWire,
    },
    Permutation {
        profile: Vec<String>,
        permutation: Vec<usize>,
        outcome: OutcomeWire,
        permuted_outcome: OutcomeWire,
    },
}

impl From<&Witness> for WitnessWire {
    fn from(w: &Witness) -> Self {
        match w {
            Witness::Profile {
                profile,
                agent,
                outcome,
            } => WitnessWire::Profile {
                profile: amounts(profile),
                agent: *agent,
                outcome: outcome.into(),
            },
            Witness::Deviation {
                values,
                agent,
                deviation,
                before,
                after,
            } => WitnessWire::Deviation {
                values: amounts(values),
                agent: *agent,
                deviation: deviation.to_string(),
                before: utilities(before),
                after: utilities(after),
            },
            Witness::Pair {
                agent,
                first,
                second,
                first_outcome,
                second_outcome,
            } => WitnessWire::Pair {
                agent: *agent,
                first: amounts(first),
                second: amounts(second),
                first_outcome: first_outcome.into(),
                second_outcome: second_outcome.into(),
            },
            Witness::Permutation {
                profile,
                permutation,
                outcome,
                permuted_outcome,
            } => WitnessWire::Permutation {
                profile: amounts(profile),
                permutation: permutation.clone(),
                outcome: outcome.into(),
                permuted_outcome: permuted_outcome.into(),
            },
        }
    }
}

impl WitnessWire {
    /// Rebuilds the core witness so a report's counterexample can be replayed.
    pub fn to_core(&self) -> Result<Witness, CliError> {
        Ok(match self {
            WitnessWire::Profile {
                profile,
                agent,
                outcome,
            } => Witness::Profile {
                profile: parse_amounts(profile)?,
                agent: *agent,
                outcome: outcome.to_core()?,
            },
            WitnessWire::Deviation {
                values,
                agent,
                deviation,
                before,
                after,
            } => Witness::Deviation {
                values: parse_amounts(values)?,
                agent: *agent,
                deviation: parse_money(deviation)?,
                before: parse_utilities(before)?,
                after: parse_utilities(after)?,
            },
            WitnessWire::Pair {
                agent,
                first,
                second,
                first_outcome,
                second_outcome,
            } => Witness::Pair {
                agent: *agent,
                first: parse_amounts(first)?,
                second: parse_amounts(second)?,
                first_outcome: first_outcome.to_core()?,
                second_outcome: second_outcome.to_core()?,
            },
            WitnessWire::Permutation {
                profile,
                permutation,
                outcome,
                permuted_outcome,
            } => Witness::Permutation {
                profile: parse_amounts(profile)?,
                permutation: permutation.clone(),
                outcome: outcome.to_core()?,
                permuted_outcome: permuted_outcome.to_core()?,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyWire {
    pub property: String,
    pub verdict: String,
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessWire>,
    /// Whether re-evaluating the mechanism reproduced the witness.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub replayed: Option<bool>,
}

impl PropertyWire {
    pub fn new(r: &PropertyReport, replayed: Option<bool>) -> Self {
        PropertyWire {
            property: r.property.name().to_string(),
            verdict: if r.passed() { "PASS" } else { "FAIL" }.to_string(),
            checked: r.checked,
            witness: r.witness.as_ref().map(WitnessWire::from),
            replayed,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRowWire {
    pub bids: Vec<String>,
    pub outcome: OutcomeWire,
}

pub fn table_rows(t: &MechanismTable) -> Vec<TableRowWire> {
    (0..t.space().size())
        .map(|i| TableRowWire {
            bids: amounts(&t.profile(i)),
            outcome: t.outcome(i).into(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdWire {
    /// Agents in service order.
    pub ranking: Vec<usize>,
    pub thresholds: Vec<String>,
    pub boundary_rule: String,
}

impl From<&ThresholdSpec> for ThresholdWire {
    fn from(s: &ThresholdSpec) -> Self {
        ThresholdWire {
            ranking: s.ranking().order().to_vec(),
            thresholds: s.thresholds().iter().map(ToString::to_string).collect(),
            boundary_rule: match s.boundary_rule() {
                BoundaryRule::HighestRankAtThreshold => "highest_rank_at_threshold",
                BoundaryRule::NoAllocation => "no_allocation",
            }
            .to_string(),
        }
    }
}

/// A multi-item bid: marginal vector or nonzero bundle values keyed by bit string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BidWire {
    Marginals(Vec<String>),
    Bundles(BTreeMap<String, String>),
}

pub trait ToBidWire {
    fn to_wire(&self) -> BidWire;
}

impl ToBidWire for HomogeneousSubmodularValuation {
    fn to_wire(&self) -> BidWire {
        BidWire::Marginals(amounts(self.marginals()))
    }
}

impl ToBidWire for BundleValuation {
    fn to_wire(&self) -> BidWire {
        BidWire::Bundles(
            Bundle::all(self.items())
                .filter(|b| !self.value(*b).is_zero())
                .map(|b| (b.to_bits(self.items()), self.value(b).to_string()))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiOutcomeWire {
    /// Bit strings, rightmost character = a1.
    pub bundles: Vec<String>,
    pub payments: Vec<String>,
}

pub fn multi_outcome(o: &MultiOutcome, items: usize) -> MultiOutcomeWire {
    MultiOutcomeWire {
        bundles: o.bundles.iter().map(|b| b.to_bits(items)).collect(),
        payments: amounts(&o.payments),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiWitnessWire {
    pub values: Vec<BidWire>,
    pub agent: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub deviation: Option<BidWire>,
    pub truthful: MultiOutcomeWire,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub deviated: Option<MultiOutcomeWire>,
    pub before: Vec<String>,
    pub after: Vec<String>,
}

pub fn multi_witness<B: ToBidWire>(w: &MultiWitness<B>, items: usize) -> MultiWitnessWire {
    MultiWitnessWire {
        values: w.values.iter().map(ToBidWire::to_wire).collect(),
        agent: w.agent,
        deviation: w.deviation.as_ref().map(ToBidWire::to_wire),
        truthful: multi_outcome(&w.truthful, items),
        deviated: w.deviated.as_ref().map(|o| multi_outcome(o, items)),
        before: utilities(&w.before),
        after: utilities(&w.after),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionWire {
    pub bundle: String,
    pub bits: String,
    pub attainable: bool,
    /// Strict inequalities in `x1, x2, ...`.
    pub inequalities: Vec<String>,
}

pub fn region(r: &Region, items: usize) -> RegionWire {
    RegionWire {
        bundle: r.bundle.to_string(),
        bits: r.bundle.to_bits(items),
        attainable: r.attainable,
        inequalities: r.inequalities.iter().map(ToString::to_string).collect(),
    }
}
