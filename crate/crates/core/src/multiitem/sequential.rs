use alloc::vec::Vec;

use crate::money::Money;
use crate::ranking::Ranking;

use super::bundle::{
    Bundle, BundleValuation, HomogeneousSubmodularValuation, MultiError, MultiOutcome, Valuation,
};
use super::MultiMechanism;

/// Ranking plus one per-item threshold for each agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequentialSpec {
    pub ranking: Ranking,
    pub thresholds: Vec<Money>,
}

impl SequentialSpec {
    pub fn new(ranking: Ranking, thresholds: Vec<Money>) -> Result<Self, MultiError> {
        if ranking.agents() != thresholds.len() {
            return Err(MultiError::AgentCountMismatch {
                expected: ranking.agents(),
                got: thresholds.len(),
            });
        }
        Ok(SequentialSpec {
            ranking,
            thresholds,
        })
    }

    pub fn with_thresholds(thresholds: Vec<Money>) -> Self {
        SequentialSpec {
            ranking: Ranking::identity(thresholds.len()),
            thresholds,
        }
    }

    pub fn agents(&self) -> usize {
        self.thresholds.len()
    }
}

/// Largest `q` with `Δ(q) ≥ t`, or 0; at most the item count.
pub fn demand(hsv: &HomogeneousSubmodularValuation, t: Money) -> usize {
    hsv.marginals().iter().take_while(|d| **d >= t).count()
}

fn check_bids<V: Valuation>(agents: usize, items: usize, bids: &[V]) -> Result<(), MultiError> {
    if bids.len() != agents {
        return Err(MultiError::AgentCountMismatch {
            expected: agents,
            got: bids.len(),
        });
    }
    for b in bids {
        if b.items() != items {
            return Err(MultiError::ItemCountMismatch {
                expected: items,
                got: b.items(),
            });
        }
    }
    Ok(())
}

/// Quantities `Q_i` handed out in ranking order starting at position `from`
/// with `supply` items left; agents ranked before `from` get 0.
pub fn sequential_quantities(
    spec: &SequentialSpec,
    bids: &[HomogeneousSubmodularValuation],
    supply: usize,
    from: usize,
) -> Vec<usize> {
    let mut q = alloc::vec![0; spec.agents()];
    let mut left = supply;
    for &agent in &spec.ranking.order()[from..] {
        let take = left.min(demand(&bids[agent], spec.thresholds[agent]));
        q[agent] = take;
        left -= take;
    }
    q
}

/// In ranking order, agent `i` takes `min(remaining, q_i)` items at `t_i` each.
/// Items are handed out by index.
pub fn sequential_allocate_hs(
    spec: &SequentialSpec,
    bids: &[HomogeneousSubmodularValuation],
) -> Result<MultiOutcome, MultiError> {
    let items = bids.first().map_or(0, |b| b.items());
    check_bids(spec.agents(), items, bids)?;
    let q = sequential_quantities(spec, bids, items, 0);
    let mut out = MultiOutcome::empty(spec.agents());
    let mut next = 0;
    for &agent in spec.ranking.order() {
        out.bundles[agent] = Bundle::range(next, q[agent]);
        out.payments[agent] = spec.thresholds[agent].times(q[agent]);
        next += q[agent];
    }
    Ok(out)
}

/// Items `a_1..a_K` in turn go to the highest-ranked agent whose marginal
/// value for the item, given what she already holds, reaches her threshold.
/// Each item won costs the winner her threshold.
pub fn sequential_allocate_general(
    spec: &SequentialSpec,
    bids: &[BundleValuation],
) -> Result<MultiOutcome, MultiError> {
    let items = bids.first().map_or(0, |b| b.items());
    check_bids(spec.agents(), items, bids)?;
    let mut out = MultiOutcome::empty(spec.agents());
    for k in 0..items {
        let taker = spec.ranking.order().iter().copied().find(|&i| {
            bids[i].marginal(out.bundles[i], k) >= spec.thresholds[i].utility()
        });
        if let Some(i) = taker {
            out.bundles[i] = out.bundles[i].with(k);
            out.payments[i] = out.payments[i] + spec.thresholds[i];
        }
    }
    Ok(out)
}

/// The sequential mechanism on homogeneous submodular bids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialHs {
    pub spec: SequentialSpec,
    pub items: usize,
}

impl MultiMechanism for SequentialHs {
    type Bid = HomogeneousSubmodularValuation;

    fn agents(&self) -> usize {
        self.spec.agents()
    }

    fn items(&self) -> usize {
        self.items
    }

    fn allocate(&self, bids: &[Self::Bid]) -> Result<MultiOutcome, MultiError> {
        check_bids(self.agents(), self.items, bids)?;
        sequential_allocate_hs(&self.spec, bids)
    }
}

/// The sequential mechanism on arbitrary bundle bids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialGeneral {
    pub spec: SequentialSpec,
    pub items: usize,
}

impl MultiMechanism for SequentialGeneral {
    type Bid = BundleValuation;

    fn agents(&self) -> usize {
        self.spec.agents()
    }

    fn items(&self) -> usize {
        self.items
    }

    fn allocate(&self, bids: &[Self::Bid]) -> Result<MultiOutcome, MultiError> {
        check_bids(self.agents(), self.items, bids)?;
        sequential_allocate_general(&self.spec, bids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::money;
    use alloc::vec;

    fn hsv(ms: &[u64]) -> HomogeneousSubmodularValuation {
        HomogeneousSubmodularValuation::new(ms.iter().map(|&m| Money::from_integer(m)).collect())
            .unwrap()
    }

    #[test]
    fn demand_examples() {
        let d = hsv(&[3, 2, 1]);
        assert_eq!(demand(&d, money("2")), 2);
        assert_eq!(demand(&d, money("4")), 0);
        assert_eq!(demand(&d, money("1")), 3);
    }

    #[test]
    fn hs_examples() {
        let spec = SequentialSpec::with_thresholds(vec![money("2"), money("1")]);
        let o = sequential_allocate_hs(&spec, &[hsv(&[3, 2, 1]), hsv(&[3, 1, 0])]).unwrap();
        assert_eq!(o.bundles, vec![Bundle(0b011), Bundle(0b100)]);
        assert_eq!(o.payments, vec![money("4"), money("1")]);

        let one = SequentialSpec::with_thresholds(vec![money("1")]);
        let o = sequential_allocate_hs(&one, &[hsv(&[0])]).unwrap();
        assert_eq!(o.bundles, vec![Bundle::EMPTY]);
        assert_eq!(o.payments, vec![Money::ZERO]);

        let two = SequentialSpec::with_thresholds(vec![money("1"), money("1")]);
        let o = sequential_allocate_hs(&two, &[hsv(&[2, 2]), hsv(&[2, 2])]).unwrap();
        assert_eq!(o.bundles, vec![Bundle(0b11), Bundle::EMPTY]);
    }

    #[test]
    fn ranking_order_is_respected() {
        let spec = SequentialSpec::new(
            Ranking::from_order(vec![1, 0]).unwrap(),
            vec![money("1"), money("1")],
        )
        .unwrap();
        let o = sequential_allocate_hs(&spec, &[hsv(&[2, 2]), hsv(&[2, 0])]).unwrap();
        assert_eq!(o.bundles, vec![Bundle(0b10), Bundle(0b01)]);
    }

    #[test]
    fn mismatched_bids_are_rejected() {
        let spec = SequentialSpec::with_thresholds(vec![money("1"), money("1")]);
        assert!(sequential_allocate_hs(&spec, &[hsv(&[1])]).is_err());
        assert!(sequential_allocate_hs(&spec, &[hsv(&[1]), hsv(&[1, 1])]).is_err());
    }
}
