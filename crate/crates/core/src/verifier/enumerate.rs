//! Enumeration of every IR and IC mechanism on a small grid.
//!
//! A candidate is an allocation table `grid^n -> {0, 1, ..., n}` in which
//! winning is preserved when the winner raises her own bid. Payments are then
//! forced: losers pay nothing and the winner pays the lowest grid bid with
//! which she would still win against the same rival bids.

use alloc::vec::Vec;

use thiserror::Error;

use crate::grid::{Grid, GridError, ProfileSpace};
use crate::mechanism::{MechanismTable, Outcome};

/// Default cap on `(n + 1)^(|grid|^n)` raw allocation tables.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("{candidates} candidate tables exceed the budget of {budget}")]
    BudgetExceeded { candidates: u128, budget: u128 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// `(n + 1)^(|grid|^n)`, saturating.
pub fn candidate_count(grid_len: usize, agents: usize) -> u128 {
    let profiles = (grid_len as u128).checked_pow(agents as u32);
    match profiles.and_then(|p| u32::try_from(p).ok()) {
        Some(p) => (agents as u128 + 1).checked_pow(p).unwrap_or(u128::MAX),
        None => u128::MAX,
    }
}

/// Streams every own-bid-monotone allocation table with induced payments,
/// in lexicographic order of the allocation-code vector.
pub fn enumerate_ir_ic_mechanisms(
    grid: &Grid,
    agents: usize,
    budget: u128,
) -> Result<IrIcTables, EnumerationError> {
    let space = grid.profile_space(agents)?;
    let candidates = candidate_count(grid.len(), agents);
    if candidates > budget {
        return Err(EnumerationError::BudgetExceeded { candidates, budget });
    }
    Ok(IrIcTables {
        grid: grid.clone(),
        space,
        codes: Vec::with_capacity(space.size()),
        upper: Vec::with_capacity(space.size()),
        started: false,
        done: false,
    })
}

pub struct IrIcTables {
    grid: Grid,
    space: ProfileSpace,
    /// Allocation codes chosen for the profile prefix (0 = unallocated).
    codes: Vec<usize>,
    /// Largest code still allowed at each chosen position.
    upper: Vec<usize>,
    started: bool,
    done: bool,
}

impl IrIcTables {
    /// Allowed code range at the next position, or `None` on a conflict.
    fn options(&self) -> Option<(usize, usize)> {
        let idx = self.codes.len();
        let n = self.space.agents();
        let mut forced = None;
        for agent in 0..n {
            let level = self.space.level_of(idx, agent);
            if level == 0 {
                continue;
            }
            let below = self.space.with_level(idx, agent, level - 1);
            if self.codes[below] == agent + 1 {
                match forced {
                    None => forced = Some(agent + 1),
                    Some(_) => return None,
                }
            }
        }
        Some(forced.map_or((0, n), |c| (c, c)))
    }

    /// Extends the prefix to a full table; false if every extension fails.
    fn descend(&mut self) -> bool {
        loop {
            if self.codes.len() == self.space.size() {
                return true;
            }
            match self.options() {
                Some((lo, hi)) => {
                    self.codes.push(lo);
                    self.upper.push(hi);
                }
                None => {
                    if !self.advance() {
                        return false;
                    }
                }
            }
        }
    }

    /// Moves to the next sibling of the deepest position that has one.
    fn advance(&mut self) -> bool {
        while let Some(code) = self.codes.pop() {
            let hi = self.upper.pop().expect("parallel stacks");
            if code < hi {
                self.codes.push(code + 1);
                self.upper.push(hi);
                return true;
            }
        }
        false
    }

    fn build(&self) -> MechanismTable {
        let n = self.space.agents();
        let outcomes = (0..self.space.size())
            .map(|idx| match self.codes[idx] {
                0 => Outcome::unallocated(n),
                code => {
                    let agent = code - 1;
                    let min_level = (0..=self.space.level_of(idx, agent))
                        .find(|&l| self.codes[self.space.with_level(idx, agent, l)] == code)
                        .expect("the profile itself wins");
                    Outcome::sale(n, agent, self.grid.level(min_level))
                }
            })
            .collect();
        MechanismTable::new(self.grid.clone(), n, outcomes).expect("well-formed table")
    }
}

impl Iterator for IrIcTables {
    type Item = MechanismTable;

    fn next(&mut self) -> Option<MechanismTable> {
        if self.done {
            return None;
        }
        let ok = if self.started {
            self.advance() && self.descend()
        } else {
            self.started = true;
            self.descend()
        };
        if !ok {
            self.done = true;
            return None;
        }
        let table = self.build();
        debug_assert!(super::check_table(super::Property::Ir, &table).passed());
        debug_assert!(super::check_table(super::Property::Ic, &table).passed());
        Some(table)
    }
}
