//! Exhaustive property checks over a tabulated mechanism.
//!
//! Every check tabulates once and then only performs lookups. Deviations are
//! restricted to grid levels, so verdicts are relative to the grid.

use alloc::vec::Vec;
use core::ops::Range;

use crate::grid::Grid;
use crate::mechanism::{tabulate, DomainError, Mechanism, MechanismTable};
use crate::money::{Money, Utility};

use super::report::{
    deviation_violates, permute_outcome, permute_profile, PartialReport, Property, PropertyReport,
    Witness,
};

/// Checks `property` on every profile of `table`.
pub fn check_table(property: Property, table: &MechanismTable) -> PropertyReport {
    check_table_range(property, table, 0..table.space().size()).finish()
}

/// Checks `property` on the profiles with indices in `range`. Results over
/// disjoint ranges combine with [`PartialReport::merge`].
pub fn check_table_range(
    property: Property,
    table: &MechanismTable,
    range: Range<usize>,
) -> PartialReport {
    let ctx = Context::new(property, table);
    let mut out = PartialReport::empty(property);
    for idx in range {
        let (checked, witness) = ctx.examine(idx);
        out.checked += checked;
        if out.first_failure.is_none() {
            if let Some(w) = witness {
                out.first_failure = Some((idx, w));
            }
        }
    }
    out
}

/// Tabulates `mechanism` on `grid^n` and checks `property`.
pub fn check<M: Mechanism + ?Sized>(
    property: Property,
    mechanism: &M,
    grid: &Grid,
    agents: usize,
) -> Result<PropertyReport, DomainError> {
    let table = tabulate(mechanism, grid, agents)?;
    Ok(check_table(property, &table))
}

pub fn check_ir<M: Mechanism + ?Sized>(m: &M, grid: &Grid, n: usize) -> Result<PropertyReport, DomainError> {
    check(Property::Ir, m, grid, n)
}

pub fn check_ic<M: Mechanism + ?Sized>(m: &M, grid: &Grid, n: usize) -> Result<PropertyReport, DomainError> {
    check(Property::Ic, m, grid, n)
}

pub fn check_sic<M: Mechanism + ?Sized>(m: &M, grid: &Grid, n: usize) -> Result<PropertyReport, DomainError> {
    check(Property::Sic, m, grid, n)
}

pub fn check_esic<M: Mechanism + ?Sized>(m: &M, grid: &Grid, n: usize) -> Result<PropertyReport, DomainError> {
    check(Property::Esic, m, grid, n)
}

pub fn check_anonymous<M: Mechanism + ?Sized>(
    m: &M,
    grid: &Grid,
    n: usize,
) -> Result<PropertyReport, DomainError> {
    check(Property::Anon, m, grid, n)
}

pub fn check_efficient<M: Mechanism + ?Sized>(
    m: &M,
    grid: &Grid,
    n: usize,
) -> Result<PropertyReport, DomainError> {
    check(Property::Eff, m, grid, n)
}

/// The three structural properties of IR / IC mechanisms, in order:
/// zero payment for losers, own-bid-invariant payments, monotone winning.
pub fn check_ir_ic_structure<M: Mechanism + ?Sized>(
    m: &M,
    grid: &Grid,
    n: usize,
) -> Result<[PropertyReport; 3], DomainError> {
    let table = tabulate(m, grid, n)?;
    Ok([
        check_table(Property::LoserPaysZero, &table),
        check_table(Property::PaymentIgnoresOwnBid, &table),
        check_table(Property::WinMonotone, &table),
    ])
}

pub fn check_winner_payment_constant<M: Mechanism + ?Sized>(
    m: &M,
    grid: &Grid,
    n: usize,
) -> Result<PropertyReport, DomainError> {
    check(Property::ConstantWinnerPayment, m, grid, n)
}

/// Per-profile anonymity failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnonymityViolation {
    pub profile: Vec<Money>,
    pub permutation: Vec<usize>,
    /// Some two agents submit equal bids, so the failure may be an artefact
    /// of tie-breaking rather than an essential asymmetry.
    pub tied: bool,
}

/// Every profile at which some relabelling of agents fails to commute with
/// the mechanism, with the first offending permutation for each.
pub fn anonymity_violations(table: &MechanismTable) -> Vec<AnonymityViolation> {
    let ctx = Context::new(Property::Anon, table);
    (0..table.space().size())
        .filter_map(|idx| match ctx.examine(idx).1 {
            Some(Witness::Permutation {
                profile,
                permutation,
                ..
            }) => {
                let tied = (0..profile.len())
                    .any(|i| (i + 1..profile.len()).any(|j| profile[i] == profile[j]));
                Some(AnonymityViolation {
                    profile,
                    permutation,
                    tied,
                })
            }
            _ => None,
        })
        .collect()
}

struct Context<'a> {
    property: Property,
    table: &'a MechanismTable,
    permutations: Vec<Vec<usize>>,
    /// First profile each agent wins, for the winner-payment check.
    first_win: Vec<Option<usize>>,
}

impl<'a> Context<'a> {
    fn new(property: Property, table: &'a MechanismTable) -> Self {
        let n = table.space().agents();
        let permutations = if property == Property::Anon {
            crate::ranking::Ranking::all(n)
                .into_iter()
                .map(|r| r.order().to_vec())
                .filter(|p| p.iter().enumerate().any(|(i, &x)| i != x))
                .collect()
        } else {
            Vec::new()
        };
        let mut first_win = alloc::vec![None; n];
        if property == Property::ConstantWinnerPayment {
            for (idx, o) in table.outcomes().iter().enumerate() {
                if let Some(w) = o.winner {
                    first_win[w].get_or_insert(idx);
                }
            }
        }
        Context {
            property,
            table,
            permutations,
            first_win,
        }
    }

    /// Number of items examined at profile `idx` and the first violation there.
    fn examine(&self, idx: usize) -> (u64, Option<Witness>) {
        let t = self.table;
        let space = t.space();
        let n = space.agents();
        let radix = space.radix();
        let outcome = t.outcome(idx);
        let profile = t.profile(idx);
        match self.property {
            Property::Ir | Property::LoserPaysZero => {
                let bad = (0..n).find(|&i| {
                    if self.property == Property::Ir {
                        outcome.utilities(&profile)[i] < Utility::from_integer(0)
                    } else {
                        outcome.winner != Some(i) && !outcome.payments[i].is_zero()
                    }
                });
                let w = bad.map(|agent| Witness::Profile {
                    profile: profile.clone(),
                    agent,
                    outcome: outcome.clone(),
                });
                (n as u64, w)
            }
            Property::Eff => {
                let w = outcome.winner.and_then(|win| {
                    profile
                        .iter()
                        .any(|b| *b > profile[win])
                        .then(|| Witness::Profile {
                            profile: profile.clone(),
                            agent: win,
                            outcome: outcome.clone(),
                        })
                });
                (1, w)
            }
            Property::Ic | Property::Sic | Property::Esic => {
                let before = outcome.utilities(&profile);
                let mut checked = 0;
                let mut found = None;
                for agent in 0..n {
                    let own = space.level_of(idx, agent);
                    for level in (0..radix).filter(|&l| l != own) {
                        checked += 1;
                        if found.is_some() {
                            continue;
                        }
                        let moved = t.outcome(space.with_level(idx, agent, level));
                        let after = moved.utilities(&profile);
                        if deviation_violates(self.property, agent, &before, &after) {
                            found = Some(Witness::Deviation {
                                values: profile.clone(),
                                agent,
                                deviation: t.grid().level(level),
                                before: before.clone(),
                                after,
                            });
                        }
                    }
                }
                (checked, found)
            }
            Property::Anon => {
                let w = self.permutations.iter().find_map(|perm| {
                    let moved = permute_profile(&profile, perm);
                    let got = t.outcome(t.index_of(&moved).expect("permuted profile is on the grid"));
                    (*got != permute_outcome(outcome, perm)).then(|| Witness::Permutation {
                        profile: profile.clone(),
                        permutation: perm.clone(),
                        outcome: outcome.clone(),
                        permuted_outcome: got.clone(),
                    })
                });
                (self.permutations.len() as u64, w)
            }
            Property::PaymentIgnoresOwnBid | Property::WinMonotone => {
                let mut checked = 0;
                let mut found = None;
                for agent in 0..n {
                    let own = space.level_of(idx, agent);
                    let wins = outcome.winner == Some(agent);
                    if self.property == Property::WinMonotone && !wins {
                        continue;
                    }
                    for level in own + 1..radix {
                        checked += 1;
                        if found.is_some() {
                            continue;
                        }
                        let other_idx = space.with_level(idx, agent, level);
                        let other = t.outcome(other_idx);
                        let other_wins = other.winner == Some(agent);
                        let bad = if self.property == Property::WinMonotone {
                            !other_wins
                        } else {
                            wins == other_wins && other.payments[agent] != outcome.payments[agent]
                        };
                        if bad {
                            found = Some(Witness::Pair {
                                agent,
                                first: profile.clone(),
                                second: t.profile(other_idx),
                                first_outcome: outcome.clone(),
                                second_outcome: other.clone(),
                            });
                        }
                    }
                }
                (checked, found)
            }
            Property::ConstantWinnerPayment => match outcome.winner {
                None => (0, None),
                Some(w) => {
                    let reference = self.first_win[w].expect("winner has a first win");
                    let ref_outcome = t.outcome(reference);
                    let bad = ref_outcome.payments[w] != outcome.payments[w];
                    let witness = bad.then(|| Witness::Pair {
                        agent: w,
                        first: t.profile(reference),
                        second: profile.clone(),
                        first_outcome: ref_outcome.clone(),
                        second_outcome: outcome.clone(),
                    });
                    (1, witness)
                }
            },
        }
    }
}
