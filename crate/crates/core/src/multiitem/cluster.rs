use alloc::vec::Vec;

use crate::money::{ExtMoney, Money, Utility};
use crate::ranking::Ranking;

use super::bundle::{Bundle, BundleValuation, MultiError, MultiOutcome, Valuation};
use super::MultiMechanism;

/// How an agent picks among bundles with equal bid gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ClusterTieRule {
    /// More items first, then the lowest mask.
    #[default]
    PreferLarger,
    /// Fewer items first, then the lowest mask.
    PreferSmaller,
    LowestMask,
}

impl ClusterTieRule {
    /// Whether `a` beats `b` at equal gain.
    fn prefers(&self, a: Bundle, b: Bundle) -> bool {
        match self {
            ClusterTieRule::PreferLarger => (a.len(), core::cmp::Reverse(a.0)) > (b.len(), core::cmp::Reverse(b.0)),
            ClusterTieRule::PreferSmaller => (a.len(), a.0) < (b.len(), b.0),
            ClusterTieRule::LowestMask => a.0 < b.0,
        }
    }
}

/// Ranking plus a threshold `t_i^T` for every agent and bundle.
/// `Infinity` marks a bundle the agent is never offered.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClusterSpec {
    pub ranking: Ranking,
    pub items: usize,
    /// `thresholds[i][T.bits()]`.
    pub thresholds: Vec<Vec<ExtMoney>>,
    pub tie_rule: ClusterTieRule,
}

impl ClusterSpec {
    pub fn new(
        ranking: Ranking,
        items: usize,
        thresholds: Vec<Vec<ExtMoney>>,
        tie_rule: ClusterTieRule,
    ) -> Result<Self, MultiError> {
        if items > super::bundle::MAX_TABLE_ITEMS {
            return Err(MultiError::TooManyItems(items));
        }
        if ranking.agents() != thresholds.len() {
            return Err(MultiError::AgentCountMismatch {
                expected: ranking.agents(),
                got: thresholds.len(),
            });
        }
        for row in &thresholds {
            if row.len() != 1 << items {
                return Err(MultiError::TableSize {
                    expected: 1 << items,
                    got: row.len(),
                });
            }
            if row[0] != ExtMoney::Finite(Money::ZERO) {
                return Err(MultiError::NonzeroEmptyThreshold(row[0].finite().unwrap_or(Money::ZERO)));
            }
        }
        Ok(ClusterSpec {
            ranking,
            items,
            thresholds,
            tie_rule,
        })
    }

    /// Identity ranking, every agent facing the same bundle thresholds.
    pub fn uniform(
        agents: usize,
        items: usize,
        thresholds: Vec<ExtMoney>,
        tie_rule: ClusterTieRule,
    ) -> Result<Self, MultiError> {
        ClusterSpec::new(
            Ranking::identity(agents),
            items,
            alloc::vec![thresholds; agents],
            tie_rule,
        )
    }

    pub fn agents(&self) -> usize {
        self.thresholds.len()
    }
}

/// In ranking order, each agent takes a bundle of the remaining items that
/// maximizes her bid value minus its threshold, paying that threshold.
pub fn cluster_allocate(
    spec: &ClusterSpec,
    bids: &[BundleValuation],
) -> Result<MultiOutcome, MultiError> {
    if bids.len() != spec.agents() {
        return Err(MultiError::AgentCountMismatch {
            expected: spec.agents(),
            got: bids.len(),
        });
    }
    if let Some(b) = bids.iter().find(|b| b.items() != spec.items) {
        return Err(MultiError::ItemCountMismatch {
            expected: spec.items,
            got: b.items(),
        });
    }
    let mut out = MultiOutcome::empty(spec.agents());
    let mut remaining = Bundle::full(spec.items);
    for &agent in spec.ranking.order() {
        let mut best: Option<(Utility, Bundle, Money)> = None;
        for t in remaining.subsets() {
            let Some(price) = spec.thresholds[agent][t.0 as usize].finite() else {
                continue;
            };
            let gain = bids[agent].value(t).utility() - price.utility();
            let better = match &best {
                None => true,
                Some((g, b, _)) => gain > *g || (gain == *g && spec.tie_rule.prefers(t, *b)),
            };
            if better {
                best = Some((gain, t, price));
            }
        }
        let (_, t, price) = best.expect("the empty bundle is always available");
        out.bundles[agent] = t;
        out.payments[agent] = price;
        remaining = remaining.minus(t);
    }
    Ok(out)
}

impl MultiMechanism for ClusterSpec {
    type Bid = BundleValuation;

    fn agents(&self) -> usize {
        self.thresholds.len()
    }

    fn items(&self) -> usize {
        self.items
    }

    fn allocate(&self, bids: &[Self::Bid]) -> Result<MultiOutcome, MultiError> {
        cluster_allocate(self, bids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::money;
    use alloc::vec;

    #[test]
    fn tie_rules() {
        let (a, b, ab) = (Bundle(1), Bundle(2), Bundle(3));
        let r = ClusterTieRule::PreferLarger;
        assert!(r.prefers(ab, a) && r.prefers(a, b) && r.prefers(a, Bundle::EMPTY));
        let r = ClusterTieRule::PreferSmaller;
        assert!(r.prefers(Bundle::EMPTY, a) && r.prefers(a, b) && !r.prefers(ab, b));
        assert!(ClusterTieRule::LowestMask.prefers(Bundle::EMPTY, a));
    }

    #[test]
    fn single_agent_takes_everything_at_zero_prices() {
        let spec = ClusterSpec::uniform(
            1,
            3,
            vec![ExtMoney::Finite(Money::ZERO); 8],
            ClusterTieRule::PreferSmaller,
        )
        .unwrap();
        let bid = BundleValuation::additive(&[money("1"), money("2"), money("1/2")]).unwrap();
        let o = cluster_allocate(&spec, &[bid]).unwrap();
        assert_eq!(o.bundles, vec![Bundle(7)]);
        assert_eq!(o.payments, vec![Money::ZERO]);
    }

    #[test]
    fn infinite_thresholds_are_never_chosen() {
        let mut ts = vec![ExtMoney::Finite(Money::ZERO); 4];
        ts[3] = ExtMoney::Infinity;
        let spec = ClusterSpec::uniform(1, 2, ts, ClusterTieRule::PreferLarger).unwrap();
        let bid = BundleValuation::additive(&[money("1"), money("2")]).unwrap();
        let o = cluster_allocate(&spec, &[bid]).unwrap();
        assert_eq!(o.bundles, vec![Bundle(2)]);
    }

    #[test]
    fn validation() {
        let bad = ClusterSpec::uniform(1, 1, vec![ExtMoney::Finite(money("1")); 2], ClusterTieRule::default());
        assert!(matches!(bad, Err(MultiError::NonzeroEmptyThreshold(_))));
        let short = ClusterSpec::uniform(1, 2, vec![ExtMoney::Finite(Money::ZERO); 3], ClusterTieRule::default());
        assert!(matches!(short, Err(MultiError::TableSize { .. })));
    }
}
