use crate::mechanism::{DomainError, Mechanism, Outcome};
use crate::money::Money;

use super::SpecError;

/// Tie policy for equal highest bids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

impl TieBreak {
    /// Index of the highest bid under this policy.
    pub fn top(&self, bids: &[Money]) -> usize {
        match self {
            TieBreak::LowestIndex => {
                let mut best = 0;
                for (i, b) in bids.iter().enumerate().skip(1) {
                    if *b > bids[best] {
                        best = i;
                    }
                }
                best
            }
        }
    }
}

/// Never allocates, never charges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NullMechanism {
    agents: usize,
}

impl NullMechanism {
    pub fn new(agents: usize) -> Result<Self, SpecError> {
        if agents == 0 {
            return Err(SpecError::TooFewAgents { min: 1, got: 0 });
        }
        Ok(NullMechanism { agents })
    }
}

pub fn null_outcome(agents: usize) -> Outcome {
    Outcome::unallocated(agents)
}

impl Mechanism for NullMechanism {
    fn agents(&self) -> usize {
        self.agents
    }

    fn evaluate(&self, profile: &[Money]) -> Result<Outcome, DomainError> {
        self.check_len(profile)?;
        Ok(null_outcome(self.agents))
    }
}

/// Highest bidder wins and pays the highest losing bid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SecondPrice {
    agents: usize,
    tie: TieBreak,
}

impl SecondPrice {
    pub fn new(agents: usize, tie: TieBreak) -> Result<Self, SpecError> {
        if agents < 2 {
            return Err(SpecError::TooFewAgents { min: 2, got: agents });
        }
        Ok(SecondPrice { agents, tie })
    }
}

pub fn second_price_outcome(bids: &[Money], tie: TieBreak) -> Outcome {
    let w = tie.top(bids);
    let price = bids
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != w)
        .map(|(_, b)| *b)
        .max()
        .unwrap_or(Money::ZERO);
    Outcome::sale(bids.len(), w, price)
}

impl Mechanism for SecondPrice {
    fn agents(&self) -> usize {
        self.agents
    }

    fn evaluate(&self, profile: &[Money]) -> Result<Outcome, DomainError> {
        self.check_len(profile)?;
        Ok(second_price_outcome(profile, self.tie))
    }
}

/// Highest bidder wins and pays her own bid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FirstPrice {
    agents: usize,
    tie: TieBreak,
}

impl FirstPrice {
    pub fn new(agents: usize, tie: TieBreak) -> Result<Self, SpecError> {
        if agents < 2 {
            return Err(SpecError::TooFewAgents { min: 2, got: agents });
        }
        Ok(FirstPrice { agents, tie })
    }
}

pub fn first_price_outcome(bids: &[Money], tie: TieBreak) -> Outcome {
    let w = tie.top(bids);
    Outcome::sale(bids.len(), w, bids[w])
}

impl Mechanism for FirstPrice {
    fn agents(&self) -> usize {
        self.agents
    }

    fn evaluate(&self, profile: &[Money]) -> Result<Outcome, DomainError> {
        self.check_len(profile)?;
        Ok(first_price_outcome(profile, self.tie))
    }
}
