//! Revenue-optimal thresholds for i.i.d. uniform values on `[0, 1]`.
//!
//! Indexing follows the in-line convention used throughout this module:
//! `t[0]` is the threshold of agent 1, who is offered the item last, and
//! `t[n-1]` belongs to agent `n`, who is offered it first.

use alloc::vec::Vec;

use thiserror::Error;

use super::exact::Exact;

/// Thresholds up to this index are exact; `t_i` has a `2^i - 1` bit denominator.
pub const EXACT_CAP: usize = 16;

/// Beyond the exact cap each recursion step is rounded to this many bits.
pub const ROUNDING_BITS: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RevenueError {
    #[error("threshold t_{index} = {value} lies outside [0, 1]")]
    OutOfRange { index: usize, value: alloc::string::String },
    #[error("threshold sequence is empty")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdSequence {
    values: Vec<Exact>,
    /// Entries `t_1..=t_{exact_prefix}` are exact; later ones carry rounding.
    exact_prefix: usize,
}

impl ThresholdSequence {
    /// An arbitrary sequence, all entries taken as exact.
    pub fn new(values: Vec<Exact>) -> Self {
        let exact_prefix = values.len();
        ThresholdSequence {
            values,
            exact_prefix,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `t_i`, 1-based.
    pub fn t(&self, i: usize) -> &Exact {
        &self.values[i - 1]
    }

    pub fn values(&self) -> &[Exact] {
        &self.values
    }

    pub fn exact_prefix(&self) -> usize {
        self.exact_prefix
    }

    pub fn is_exact(&self) -> bool {
        self.exact_prefix == self.values.len()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Exact::to_f64).collect()
    }

    /// The first `n` entries.
    pub fn truncate(&self, n: usize) -> ThresholdSequence {
        ThresholdSequence {
            values: self.values[..n].to_vec(),
            exact_prefix: self.exact_prefix.min(n),
        }
    }

    fn check_unit(&self) -> Result<(), RevenueError> {
        if self.values.is_empty() {
            return Err(RevenueError::Empty);
        }
        for (i, t) in self.values.iter().enumerate() {
            if t.one_minus().is_none() {
                return Err(RevenueError::OutOfRange {
                    index: i + 1,
                    value: alloc::format!("{t}"),
                });
            }
        }
        Ok(())
    }
}

fn step(t: &Exact) -> Exact {
    let sq = t * t;
    &(&sq + &Exact::one()) * &Exact::ratio(1, 2).expect("nonzero")
}

/// `t_1 = 1/2`, `t_{i+1} = (1 + t_i^2) / 2`, exact through [`EXACT_CAP`].
pub fn optimal_thresholds_uniform(n: usize) -> ThresholdSequence {
    optimal_thresholds_with(n, EXACT_CAP, ROUNDING_BITS)
}

/// As [`optimal_thresholds_uniform`] with an explicit exact cap and rounding precision.
pub fn optimal_thresholds_with(n: usize, exact_cap: usize, bits: u64) -> ThresholdSequence {
    let mut values = Vec::with_capacity(n);
    let mut t = Exact::ratio(1, 2).expect("nonzero");
    for i in 1..=n {
        if i > 1 {
            t = step(&t);
            if i > exact_cap {
                t = t.round_dyadic(bits);
            }
        }
        values.push(t.clone());
    }
    ThresholdSequence {
        values,
        exact_prefix: n.min(exact_cap.max(1)),
    }
}

/// `γ_1 = (1 - t_1) t_1`, `γ_{k+1} = (1 - t_{k+1}) t_{k+1} + t_{k+1} γ_k`.
pub fn revenue_recursive(t: &ThresholdSequence) -> Result<Exact, RevenueError> {
    t.check_unit()?;
    let mut gamma = Exact::zero();
    for tk in t.values() {
        let sale = &tk.one_minus().expect("checked") * tk;
        gamma = &sale + &(tk * &gamma);
    }
    Ok(gamma)
}

/// Exact `γ_n` under the optimal thresholds.
pub fn expected_revenue_recursive(n: usize) -> Exact {
    revenue_recursive(&optimal_thresholds_uniform(n)).expect("optimal thresholds lie in [0, 1]")
}

/// Expected revenue of offering the item at `t_n`, then `t_{n-1}`, and so on,
/// expanded as `Σ_k (1 - t_k) t_k Π_{j > k} t_j`.
pub fn expected_revenue_closed(t: &ThresholdSequence) -> Result<Exact, RevenueError> {
    t.check_unit()?;
    let mut total = Exact::zero();
    let mut reach = Exact::one();
    for tk in t.values().iter().rev() {
        let sale = &tk.one_minus().expect("checked") * tk;
        total = &total + &(&reach * &sale);
        reach = &reach * tk;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSearch {
    pub n: usize,
    pub step_denominator: u64,
    pub best_revenue: Exact,
    pub best_thresholds: ThresholdSequence,
    pub recursion_revenue: Exact,
}

impl GridSearch {
    /// No grid sequence beats the recursion.
    pub fn recursion_dominates(&self) -> bool {
        self.recursion_revenue >= self.best_revenue
    }
}

/// Exhaustive search over `t ∈ {0, 1/d, ..., 1}^n`, compared with the recursion.
pub fn grid_search_thresholds(n: usize, step_denominator: u64) -> Result<GridSearch, RevenueError> {
    if n == 0 {
        return Err(RevenueError::Empty);
    }
    let d = step_denominator.max(1);
    let levels: Vec<Exact> = (0..=d).map(|k| Exact::ratio(k, d).expect("nonzero")).collect();
    let mut idx = alloc::vec![0usize; n];
    let mut best: Option<(Exact, Vec<usize>)> = None;
    loop {
        let seq = ThresholdSequence::new(idx.iter().map(|&k| levels[k].clone()).collect());
        let r = expected_revenue_closed(&seq).expect("grid lies in [0, 1]");
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, idx.clone()));
        }
        let mut pos = 0;
        loop {
            if pos == n {
                let (best_revenue, at) = best.expect("at least one point");
                return Ok(GridSearch {
                    n,
                    step_denominator: d,
                    best_revenue,
                    best_thresholds: ThresholdSequence::new(
                        at.iter().map(|&k| levels[k].clone()).collect(),
                    ),
                    recursion_revenue: expected_revenue_recursive(n),
                });
            }
            idx[pos] += 1;
            if idx[pos] <= d as usize {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
