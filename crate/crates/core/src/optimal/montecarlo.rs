//! Seeded Monte-Carlo estimates for threshold mechanisms with uniform values.
//!
//! Samples are split into fixed-size batches. Batch `b` draws from ChaCha8
//! seeded with the user seed on stream `b`, so batches can run in any order
//! or in parallel; merging their statistics in batch order gives the same
//! bits as a sequential run.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::money::Money;

use super::exact::Exact;
use super::thresholds::ThresholdSequence;

pub const PRNG_ALGORITHM: &str = "chacha8/rand_chacha-0.9/stream-per-batch";

pub const BATCH_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct RevenueEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub algorithm: &'static str,
}

/// Running sums for one or more batches.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SampleStats {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl SampleStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(self, other: SampleStats) -> SampleStats {
        SampleStats {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    /// Sample standard deviation over `sqrt(count)`.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        libm::sqrt(var / n)
    }

    pub fn estimate(&self, seed: u64) -> RevenueEstimate {
        RevenueEstimate {
            mean: self.mean(),
            std_error: self.std_error(),
            samples: self.count,
            seed,
            algorithm: PRNG_ALGORITHM,
        }
    }
}

pub fn batch_count(samples: u64) -> u64 {
    samples.div_ceil(BATCH_SIZE)
}

fn batch_len(samples: u64, batch: u64) -> u64 {
    (samples - batch * BATCH_SIZE).min(BATCH_SIZE)
}

pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Revenue of one draw: agents are offered the item from index `n` down to 1,
/// each value drawn only when her offer is reached.
fn revenue_draw(thresholds: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    for &t in thresholds.iter().rev() {
        let v: f64 = rng.random();
        if v >= t {
            return t;
        }
    }
    0.0
}

/// Statistics of batch `batch` out of `samples` total draws.
pub fn revenue_batch(thresholds: &[f64], samples: u64, seed: u64, batch: u64) -> SampleStats {
    let mut rng = batch_rng(seed, batch);
    let mut stats = SampleStats::default();
    for _ in 0..batch_len(samples, batch) {
        stats.push(revenue_draw(thresholds, &mut rng));
    }
    stats
}

/// Merges per-batch statistics in batch order.
pub fn merge_batches(batches: impl IntoIterator<Item = SampleStats>) -> SampleStats {
    batches
        .into_iter()
        .fold(SampleStats::default(), SampleStats::merge)
}

pub fn monte_carlo_revenue(t: &ThresholdSequence, samples: u64, seed: u64) -> RevenueEstimate {
    let ts = t.to_f64();
    merge_batches((0..batch_count(samples)).map(|b| revenue_batch(&ts, samples, seed, b)))
        .estimate(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyRow {
    pub n: usize,
    /// `1 - (1 - ε)^n`, exact.
    pub closed_form: Exact,
    pub estimate: RevenueEstimate,
}

/// Whether some of `n` uniform draws reaches `threshold`, stopping at the first.
fn allocation_draw(threshold: f64, n: usize, rng: &mut ChaCha8Rng) -> f64 {
    for _ in 0..n {
        let v: f64 = rng.random();
        if v >= threshold {
            return 1.0;
        }
    }
    0.0
}

pub fn allocation_batch(
    epsilon: f64,
    n: usize,
    samples: u64,
    seed: u64,
    batch: u64,
) -> SampleStats {
    let mut rng = batch_rng(seed, batch);
    let mut stats = SampleStats::default();
    let threshold = 1.0 - epsilon;
    for _ in 0..batch_len(samples, batch) {
        stats.push(allocation_draw(threshold, n, &mut rng));
    }
    stats
}

/// `None` unless `0 < ε < 1`.
pub fn allocation_probability_closed(epsilon: Money, n: usize) -> Option<Exact> {
    let e = Exact::from(epsilon);
    if e.is_zero() || e >= Exact::one() {
        return None;
    }
    let keep = e.one_minus()?.pow(n as u32);
    keep.one_minus()
}

/// Probability that a flat threshold of `1 - ε` sells the item among `n`
/// agents, in closed form and by simulation. `None` unless `0 < ε < 1`.
pub fn efficiency_loss_probe(
    epsilon: Money,
    n_list: &[usize],
    samples: u64,
    seed: u64,
) -> Option<Vec<EfficiencyRow>> {
    let eps = epsilon.to_f64();
    n_list
        .iter()
        .map(|&n| {
            let closed_form = allocation_probability_closed(epsilon, n)?;
            let stats = merge_batches(
                (0..batch_count(samples)).map(|b| allocation_batch(eps, n, samples, seed, b)),
            );
            Some(EfficiencyRow {
                n,
                closed_form,
                estimate: stats.estimate(seed),
            })
        })
        .collect()
}
