//! Priority rankings over agents.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ranking is not a permutation of 1..={0}")]
pub struct RankingError(pub usize);

/// A bijection from agents to priority positions. Position 0 is served first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ranking {
    position: Vec<usize>,
    order: Vec<usize>,
}

impl Ranking {
    pub fn identity(agents: usize) -> Self {
        Ranking {
            position: (0..agents).collect(),
            order: (0..agents).collect(),
        }
    }

    /// From 0-based positions, `positions[i]` being agent `i`'s slot.
    pub fn from_positions(positions: Vec<usize>) -> Result<Self, RankingError> {
        let n = positions.len();
        let mut order = alloc::vec![usize::MAX; n];
        for (agent, &pos) in positions.iter().enumerate() {
            if pos >= n || order[pos] != usize::MAX {
                return Err(RankingError(n));
            }
            order[pos] = agent;
        }
        Ok(Ranking {
            position: positions,
            order,
        })
    }

    /// From the external 1-based form `R(i) ∈ {1..n}`.
    pub fn from_priorities(priorities: &[usize]) -> Result<Self, RankingError> {
        let n = priorities.len();
        let positions = priorities
            .iter()
            .map(|&p| p.checked_sub(1).ok_or(RankingError(n)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_positions(positions)
    }

    /// Agents listed first-served first.
    pub fn from_order(order: Vec<usize>) -> Result<Self, RankingError> {
        let n = order.len();
        let mut position = alloc::vec![usize::MAX; n];
        for (pos, &agent) in order.iter().enumerate() {
            if agent >= n || position[agent] != usize::MAX {
                return Err(RankingError(n));
            }
            position[agent] = pos;
        }
        Ok(Ranking { position, order })
    }

    pub fn agents(&self) -> usize {
        self.position.len()
    }

    pub fn position(&self, agent: usize) -> usize {
        self.position[agent]
    }

    /// 1-based priorities, `R(i)`.
    pub fn priorities(&self) -> Vec<usize> {
        self.position.iter().map(|p| p + 1).collect()
    }

    /// Agents in service order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn all(agents: usize) -> Vec<Ranking> {
        let mut out = Vec::new();
        let mut order: Vec<usize> = (0..agents).collect();
        permutations(&mut order, 0, &mut out);
        out.sort_by(|a, b| a.order.cmp(&b.order));
        out
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Ranking>) {
    if k == items.len() {
        out.push(Ranking::from_order(items.clone()).expect("permutation"));
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}
