//! Finite valuation grids and bid-profile enumeration.

use alloc::vec::Vec;

use thiserror::Error;

use crate::money::Money;

pub type BidProfile = Vec<Money>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid has no levels")]
    Empty,
    #[error("profile space {levels}^{agents} does not fit in memory indices")]
    TooLarge { levels: usize, agents: usize },
}

/// A strictly increasing, nonempty set of levels standing in for the
/// nonnegative reals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    levels: Vec<Money>,
}

impl Grid {
    /// Sorts and deduplicates the given levels.
    pub fn new(mut levels: Vec<Money>) -> Result<Self, GridError> {
        levels.sort();
        levels.dedup();
        if levels.is_empty() {
            return Err(GridError::Empty);
        }
        Ok(Grid { levels })
    }

    /// Grid `{0, 1, ..., max}`.
    pub fn integers(max: u64) -> Self {
        Grid {
            levels: (0..=max).map(Money::from_integer).collect(),
        }
    }

    pub fn levels(&self) -> &[Money] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, idx: usize) -> Money {
        self.levels[idx]
    }

    pub fn index_of(&self, m: &Money) -> Option<usize> {
        self.levels.binary_search(m).ok()
    }

    pub fn contains(&self, m: &Money) -> bool {
        self.index_of(m).is_some()
    }

    /// Augments the grid so that every critical value (a finite threshold)
    /// is a level, some level lies strictly between each pair of consecutive
    /// distinct critical values (and between 0 and the smallest nonzero one),
    /// and some level lies strictly above the largest. Levels are only added
    /// where missing, so an already-closed grid is returned unchanged.
    pub fn closure(&self, critical: &[Money]) -> Grid {
        if critical.is_empty() {
            return self.clone();
        }
        let mut crit: Vec<Money> = critical.to_vec();
        crit.push(Money::ZERO);
        crit.sort();
        crit.dedup();
        let mut levels = self.levels.clone();
        levels.extend(crit.iter().copied());
        for pair in crit.windows(2) {
            if !levels.iter().any(|l| *l > pair[0] && *l < pair[1]) {
                levels.push(pair[0].midpoint(&pair[1]));
            }
        }
        let top = *crit.last().expect("zero was pushed");
        if !levels.iter().any(|l| *l > top) {
            levels.push(top + Money::ONE);
        }
        Grid::new(levels).expect("closure of a nonempty grid is nonempty")
    }

    pub fn profile_space(&self, agents: usize) -> Result<ProfileSpace, GridError> {
        ProfileSpace::new(self.len(), agents)
    }

    /// All `|grid|^n` profiles in lexicographic order (agent 1 most significant).
    pub fn profiles(&self, agents: usize) -> Result<Profiles<'_>, GridError> {
        let space = self.profile_space(agents)?;
        Ok(Profiles {
            grid: self,
            space,
            next: 0,
        })
    }

    pub fn profile_at(&self, space: &ProfileSpace, index: usize) -> BidProfile {
        space
            .decode(index)
            .into_iter()
            .map(|i| self.levels[i])
            .collect()
    }
}

/// Mixed-radix indexing of `grid^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProfileSpace {
    radix: usize,
    agents: usize,
    size: usize,
}

impl ProfileSpace {
    pub fn new(radix: usize, agents: usize) -> Result<Self, GridError> {
        if radix == 0 {
            return Err(GridError::Empty);
        }
        let size = u32::try_from(agents)
            .ok()
            .and_then(|a| radix.checked_pow(a))
            .ok_or(GridError::TooLarge {
                levels: radix,
                agents,
            })?;
        Ok(ProfileSpace {
            radix,
            agents,
            size,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    pub fn encode(&self, levels: &[usize]) -> usize {
        debug_assert_eq!(levels.len(), self.agents);
        levels.iter().fold(0, |acc, &l| acc * self.radix + l)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; self.agents];
        for slot in out.iter_mut().rev() {
            *slot = index % self.radix;
            index /= self.radix;
        }
        out
    }

    /// Distance between consecutive levels of `agent` in the encoding.
    pub fn stride(&self, agent: usize) -> usize {
        self.radix.pow((self.agents - 1 - agent) as u32)
    }

    /// Level of `agent` inside an encoded profile.
    pub fn level_of(&self, index: usize, agent: usize) -> usize {
        (index / self.stride(agent)) % self.radix
    }

    /// Same profile with `agent`'s level replaced.
    pub fn with_level(&self, index: usize, agent: usize, level: usize) -> usize {
        let stride = self.stride(agent);
        let current = (index / stride) % self.radix;
        index - current * stride + level * stride
    }
}

pub struct Profiles<'a> {
    grid: &'a Grid,
    space: ProfileSpace,
    next: usize,
}

impl Iterator for Profiles<'_> {
    type Item = BidProfile;

    fn next(&mut self) -> Option<BidProfile> {
        if self.next >= self.space.size {
            return None;
        }
        let p = self.grid.profile_at(&self.space, self.next);
        self.next += 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.space.size - self.next;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for Profiles<'_> {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::money::money;
    use alloc::vec;

    fn grid(s: &[&str]) -> Grid {
        Grid::new(s.iter().map(|x| money(x)).collect()).unwrap()
    }

    #[test]
    fn two_agent_binary_grid() {
        let g = grid(&["0", "1"]);
        let all: Vec<_> = g.profiles(2).unwrap().collect();
        let z = money("0");
        let o = money("1");
        assert_eq!(all, vec![vec![z, z], vec![z, o], vec![o, z], vec![o, o]]);
    }

    #[test]
    fn singleton_grid_three_agents() {
        let g = grid(&["0"]);
        let all: Vec<_> = g.profiles(3).unwrap().collect();
        assert_eq!(all, vec![vec![money("0"); 3]]);
    }

    #[test]
    fn count_is_power() {
        assert_eq!(grid(&["0", "1", "2"]).profiles(2).unwrap().count(), 9);
    }

    #[test]
    fn sorts_and_dedups() {
        assert_eq!(grid(&["2", "0", "2", "1/2"]).levels(), grid(&["0", "1/2", "2"]).levels());
        assert_eq!(Grid::new(vec![]), Err(GridError::Empty));
    }

    #[test]
    fn overflowing_space_is_rejected() {
        assert!(matches!(
            Grid::integers(1000).profiles(64),
            Err(GridError::TooLarge { .. })
        ));
    }

    #[test]
    fn encoding_helpers_agree() {
        let s = ProfileSpace::new(3, 3).unwrap();
        for idx in 0..s.size() {
            let lv = s.decode(idx);
            assert_eq!(s.encode(&lv), idx);
            for a in 0..3 {
                assert_eq!(s.level_of(idx, a), lv[a]);
                let mut moved = lv.clone();
                moved[a] = 2;
                assert_eq!(s.with_level(idx, a, 2), s.encode(&moved));
            }
        }
    }

    #[test]
    fn closure_adds_thresholds_and_gaps() {
        let g = grid(&["0"]);
        let c = g.closure(&[money("1"), money("2")]);
        assert_eq!(c.levels(), grid(&["0", "1/2", "1", "3/2", "2", "3"]).levels());
        // already closed
        let full = grid(&["0", "1/2", "1", "3/2", "2", "5/2"]);
        assert_eq!(full.closure(&[money("0"), money("1"), money("2")]), full);
        assert_eq!(full.closure(&[]), full);
    }
}
