use alloc::vec::Vec;

use crate::mechanism::{DomainError, Mechanism, Outcome};
use crate::money::{ExtMoney, Money};
use crate::ranking::Ranking;

use super::SpecError;

/// Who gets the item when nobody bids strictly above their threshold but
/// somebody bids exactly at it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundaryRule {
    /// The highest-priority agent bidding exactly her threshold wins and pays it.
    #[default]
    HighestRankAtThreshold,
    NoAllocation,
}

/// Priority ranking plus a take-it-or-leave-it price per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThresholdSpec {
    ranking: Ranking,
    thresholds: Vec<ExtMoney>,
    boundary_rule: BoundaryRule,
}

impl ThresholdSpec {
    pub fn new(
        ranking: Ranking,
        thresholds: Vec<ExtMoney>,
        boundary_rule: BoundaryRule,
    ) -> Result<Self, SpecError> {
        if ranking.agents() != thresholds.len() {
            return Err(SpecError::LengthMismatch {
                expected: ranking.agents(),
                got: thresholds.len(),
            });
        }
        if thresholds.is_empty() {
            return Err(SpecError::TooFewAgents { min: 1, got: 0 });
        }
        Ok(ThresholdSpec {
            ranking,
            thresholds,
            boundary_rule,
        })
    }

    /// Identity ranking, default boundary rule.
    pub fn with_thresholds(thresholds: Vec<ExtMoney>) -> Self {
        let n = thresholds.len();
        Self::new(Ranking::identity(n), thresholds, BoundaryRule::default())
            .expect("identity ranking matches")
    }

    /// All thresholds infinite: the item is never sold.
    pub fn null(agents: usize) -> Self {
        Self::with_thresholds(alloc::vec![ExtMoney::Infinity; agents])
    }

    pub fn ranking(&self) -> &Ranking {
        &self.ranking
    }

    pub fn thresholds(&self) -> &[ExtMoney] {
        &self.thresholds
    }

    pub fn boundary_rule(&self) -> BoundaryRule {
        self.boundary_rule
    }

    pub fn with_boundary_rule(mut self, rule: BoundaryRule) -> Self {
        self.boundary_rule = rule;
        self
    }

    /// Outcome for a bid profile. Lengths must agree.
    pub fn outcome(&self, bids: &[Money]) -> Outcome {
        let n = self.thresholds.len();
        debug_assert_eq!(bids.len(), n);
        let strictly_above = (0..n).any(|j| self.thresholds[j] < ExtMoney::Finite(bids[j]));
        let order = self.ranking.order();
        let winner = if strictly_above {
            order
                .iter()
                .copied()
                .find(|&j| self.thresholds[j] <= ExtMoney::Finite(bids[j]))
        } else {
            match self.boundary_rule {
                BoundaryRule::HighestRankAtThreshold => order
                    .iter()
                    .copied()
                    .find(|&j| self.thresholds[j] == ExtMoney::Finite(bids[j])),
                BoundaryRule::NoAllocation => None,
            }
        };
        match winner {
            Some(w) => {
                let price = self.thresholds[w].finite().expect("winner has a finite threshold");
                Outcome::sale(n, w, price)
            }
            None => Outcome::unallocated(n),
        }
    }
}

impl Mechanism for ThresholdSpec {
    fn agents(&self) -> usize {
        self.thresholds.len()
    }

    fn evaluate(&self, profile: &[Money]) -> Result<Outcome, DomainError> {
        self.check_len(profile)?;
        Ok(self.outcome(profile))
    }

    fn critical_values(&self) -> Vec<Money> {
        self.thresholds.iter().filter_map(ExtMoney::finite).collect()
    }
}
