//! Optimal thresholds and expected revenue for i.i.d. uniform values.

mod exact;
mod montecarlo;
mod thresholds;

pub use exact::Exact;
pub use montecarlo::{
    allocation_batch, allocation_probability_closed, batch_count, batch_rng,
    efficiency_loss_probe, merge_batches, monte_carlo_revenue, revenue_batch, EfficiencyRow,
    RevenueEstimate, SampleStats, BATCH_SIZE, PRNG_ALGORITHM,
};
pub use thresholds::{
    expected_revenue_closed, expected_revenue_recursive, grid_search_thresholds,
    optimal_thresholds_uniform, optimal_thresholds_with, revenue_recursive, GridSearch,
    RevenueError, ThresholdSequence, EXACT_CAP, ROUNDING_BITS,
};

#[cfg(test)]
mod tests;
