//! Multi-item allocation: bundles and valuations, the sequential and cluster
//! threshold mechanisms, exhaustive incentive checks and bundle-choice regions.

mod bundle;
mod checks;
mod cluster;
mod regions;
mod sequential;

pub use bundle::{
    Bundle, BundleValuation, HomogeneousSubmodularValuation, MultiError, MultiOutcome, Valuation,
    MAX_TABLE_ITEMS,
};
pub use checks::{
    check_multi, check_multi_ic, check_multi_ir, check_multi_sic, payment_range_bound,
    payment_range_cardinality, payment_ranges, MultiReport, MultiWitness, OwnBidDependence,
    PaymentRange, PaymentRangeError,
};
pub use cluster::{cluster_allocate, ClusterSpec, ClusterTieRule};
pub use regions::{
    classify_lattice, classify_point, region_partition, Region, RegionSystem, StrictInequality,
};
pub use sequential::{
    demand, sequential_allocate_general, sequential_allocate_hs, sequential_quantities,
    SequentialGeneral, SequentialHs, SequentialSpec,
};

use alloc::vec::Vec;

/// A deterministic multi-item mechanism.
pub trait MultiMechanism {
    type Bid: Valuation + Clone;

    fn agents(&self) -> usize;
    fn items(&self) -> usize;
    fn allocate(&self, bids: &[Self::Bid]) -> Result<MultiOutcome, MultiError>;

    /// Allocates and checks that no item is handed out twice.
    fn allocate_checked(&self, bids: &[Self::Bid]) -> Result<MultiOutcome, MultiError> {
        let o = self.allocate(bids)?;
        assert!(o.is_feasible(self.items()), "infeasible allocation {o:?}");
        Ok(o)
    }
}

/// `check_multi` candidate sets where every agent draws from the same domain.
pub fn shared_domain<B: Clone>(agents: usize, domain: &[B]) -> Vec<Vec<B>> {
    alloc::vec![domain.to_vec(); agents]
}

#[cfg(test)]
mod tests;
