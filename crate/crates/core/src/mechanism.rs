//! Single-item outcomes, the mechanism interface and tabulated mechanisms.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::grid::{BidProfile, Grid, GridError, ProfileSpace};
use crate::money::{Money, Utility};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("profile has {got} bids, mechanism expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bid {bid} of agent {agent} is not a grid level")]
    OffGrid { agent: usize, bid: Money },
    #[error("agent index {agent} out of range for {agents} agents")]
    AgentOutOfRange { agent: usize, agents: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Allocation and payments for one bid profile. Agents are 0-indexed here;
/// [`Outcome::allocation_code`] gives the external `0 = unallocated, i = agent i`
/// encoding.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub winner: Option<usize>,
    pub payments: Vec<Money>,
}

impl Outcome {
    pub fn unallocated(agents: usize) -> Self {
        Outcome {
            winner: None,
            payments: alloc::vec![Money::ZERO; agents],
        }
    }

    /// `agent` wins and pays `price`; everyone else pays nothing.
    pub fn sale(agents: usize, agent: usize, price: Money) -> Self {
        let mut payments = alloc::vec![Money::ZERO; agents];
        payments[agent] = price;
        Outcome {
            winner: Some(agent),
            payments,
        }
    }

    pub fn agents(&self) -> usize {
        self.payments.len()
    }

    pub fn allocation_code(&self) -> usize {
        self.winner.map_or(0, |w| w + 1)
    }

    pub fn from_allocation_code(code: usize, payments: Vec<Money>) -> Self {
        Outcome {
            winner: code.checked_sub(1),
            payments,
        }
    }

    /// Utilities of every agent given true values.
    pub fn utilities(&self, values: &[Money]) -> Vec<Utility> {
        (0..self.agents())
            .map(|i| self.utility_unchecked(i, &values[i]))
            .collect()
    }

    fn utility_unchecked(&self, agent: usize, value: &Money) -> Utility {
        let pay = self.payments[agent].utility();
        if self.winner == Some(agent) {
            value.utility() - pay
        } else {
            -pay
        }
    }
}

impl fmt::Debug for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "winner={} payments={:?}", self.allocation_code(), self.payments)
    }
}

/// `v_i * A_i(b) - P_i(b)`.
pub fn utility(outcome: &Outcome, agent: usize, true_value: &Money) -> Result<Utility, DomainError> {
    if agent >= outcome.agents() {
        return Err(DomainError::AgentOutOfRange {
            agent,
            agents: outcome.agents(),
        });
    }
    Ok(outcome.utility_unchecked(agent, true_value))
}

/// A deterministic single-item mechanism.
pub trait Mechanism {
    fn agents(&self) -> usize;

    fn evaluate(&self, profile: &[Money]) -> Result<Outcome, DomainError>;

    /// Amounts at which the mechanism's behaviour changes (finite thresholds).
    /// Used to close verification grids.
    fn critical_values(&self) -> Vec<Money> {
        Vec::new()
    }

    fn check_len(&self, profile: &[Money]) -> Result<(), DomainError> {
        if profile.len() != self.agents() {
            return Err(DomainError::LengthMismatch {
                expected: self.agents(),
                got: profile.len(),
            });
        }
        Ok(())
    }
}

impl<M: Mechanism + ?Sized> Mechanism for &M {
    fn agents(&self) -> usize {
        (**self).agents()
    }

    fn evaluate(&self, profile: &[Money]) -> Result<Outcome, DomainError> {
        (**self).evaluate(profile)
    }

    fn critical_values(&self) -> Vec<Money> {
        (**self).critical_values()
    }
}

/// A mechanism stored as an explicit outcome per profile of `grid^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MechanismTable {
    grid: Grid,
    space: ProfileSpace,
    outcomes: Vec<Outcome>,
}

impl MechanismTable {
    /// `outcomes` must be in lexicographic profile order.
    pub fn new(grid: Grid, agents: usize, outcomes: Vec<Outcome>) -> Result<Self, DomainError> {
        let space = grid.profile_space(agents)?;
        if outcomes.len() != space.size() {
            return Err(DomainError::LengthMismatch {
                expected: space.size(),
                got: outcomes.len(),
            });
        }
        for o in &outcomes {
            if o.payments.len() != agents {
                return Err(DomainError::LengthMismatch {
                    expected: agents,
                    got: o.payments.len(),
                });
            }
            if let Some(w) = o.winner {
                if w >= agents {
                    return Err(DomainError::AgentOutOfRange { agent: w, agents });
                }
            }
        }
        Ok(MechanismTable {
            grid,
            space,
            outcomes,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn space(&self) -> &ProfileSpace {
        &self.space
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn outcome(&self, index: usize) -> &Outcome {
        &self.outcomes[index]
    }

    pub fn profile(&self, index: usize) -> BidProfile {
        self.grid.profile_at(&self.space, index)
    }

    pub fn levels(&self, index: usize) -> Vec<usize> {
        self.space.decode(index)
    }

    pub fn index_of(&self, profile: &[Money]) -> Result<usize, DomainError> {
        self.check_len(profile)?;
        let mut idx = 0;
        for (agent, bid) in profile.iter().enumerate() {
            let level = self
                .grid
                .index_of(bid)
                .ok_or(DomainError::OffGrid { agent, bid: *bid })?;
            idx = idx * self.space.radix() + level;
        }
        Ok(idx)
    }

    pub fn winners(&self) -> impl Iterator<Item = Option<usize>> + '_ {
        self.outcomes.iter().map(|o| o.winner)
    }

    /// True when the item is never allocated and nobody ever pays.
    pub fn is_null(&self) -> bool {
        self.outcomes
            .iter()
            .all(|o| o.winner.is_none() && o.payments.iter().all(Money::is_zero))
    }
}

impl Mechanism for MechanismTable {
    fn agents(&self) -> usize {
        self.space.agents()
    }

    fn evaluate(&self, profile: &[Money]) -> Result<Outcome, DomainError> {
        let idx = self.index_of(profile)?;
        Ok(self.outcomes[idx].clone())
    }
}

impl fmt::Debug for MechanismTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MechanismTable grid={:?} n={}", self.grid.levels(), self.agents())?;
        for (i, o) in self.outcomes.iter().enumerate() {
            writeln!(f, "  {:?} -> {:?}", self.profile(i), o)?;
        }
        Ok(())
    }
}

/// Evaluates `mechanism` at every profile of `grid^n`.
pub fn tabulate<M: Mechanism + ?Sized>(
    mechanism: &M,
    grid: &Grid,
    agents: usize,
) -> Result<MechanismTable, DomainError> {
    if agents != mechanism.agents() {
        return Err(DomainError::LengthMismatch {
            expected: mechanism.agents(),
            got: agents,
        });
    }
    let outcomes = grid
        .profiles(agents)?
        .map(|p| mechanism.evaluate(&p))
        .collect::<Result<Vec<_>, _>>()?;
    MechanismTable::new(grid.clone(), agents, outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::money::money;
    use alloc::vec;
    use num_rational::Ratio;

    #[test]
    fn utility_examples() {
        let o = Outcome::sale(2, 0, money("1"));
        assert_eq!(utility(&o, 0, &money("2")).unwrap(), Ratio::from_integer(1));

        let none = Outcome::unallocated(2);
        assert_eq!(utility(&none, 0, &money("7")).unwrap(), Ratio::from_integer(0));

        let other = Outcome::sale(2, 1, money("3"));
        assert_eq!(utility(&other, 0, &money("3")).unwrap(), Ratio::from_integer(0));

        assert!(matches!(
            utility(&other, 2, &money("1")),
            Err(DomainError::AgentOutOfRange { agent: 2, agents: 2 })
        ));
    }

    #[test]
    fn overpaying_winner_has_negative_utility() {
        let o = Outcome::sale(1, 0, money("3"));
        assert_eq!(utility(&o, 0, &money("1")).unwrap(), Ratio::from_integer(-2));
    }

    #[test]
    fn allocation_codes() {
        assert_eq!(Outcome::unallocated(3).allocation_code(), 0);
        assert_eq!(Outcome::sale(3, 2, money("1")).allocation_code(), 3);
        let o = Outcome::from_allocation_code(2, vec![money("0"), money("1")]);
        assert_eq!(o.winner, Some(1));
    }

    #[test]
    fn table_lookup_and_domain_errors() {
        let grid = Grid::integers(1);
        let outs = (0..4)
            .map(|i| Outcome::sale(2, i % 2, Money::from_integer(i as u64)))
            .collect();
        let t = MechanismTable::new(grid, 2, outs).unwrap();
        let o = t.evaluate(&[money("1"), money("0")]).unwrap();
        assert_eq!(o, Outcome::sale(2, 0, money("2")));
        assert!(matches!(
            t.evaluate(&[money("1/2"), money("0")]),
            Err(DomainError::OffGrid { agent: 0, .. })
        ));
        assert!(matches!(
            t.evaluate(&[money("1")]),
            Err(DomainError::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn table_rejects_wrong_size() {
        let r = MechanismTable::new(Grid::integers(1), 2, vec![Outcome::unallocated(2)]);
        assert!(matches!(r, Err(DomainError::LengthMismatch { expected: 4, got: 1 })));
    }
}
